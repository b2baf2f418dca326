//! Planar problems in edge tangent angles.
//!
//! Unknowns are the angles `theta_1..theta_N` of the `N` edges (plus the
//! length `L` when it is free); every edge has length `L/N`, so the curve is
//! constant-speed by construction. Constraints:
//!
//! * `(L/N) sum cos theta = dx`, `(L/N) sum sin theta = dy`;
//! * `1.5 theta_1 - 0.5 theta_2 = theta_start`, and the mirror relation at
//!   the other end with `theta_end + 2 pi k`, where the lift `k` fixes the
//!   total turning.
//!
//! The energy is `sum_i w_i (theta_{i+1} - theta_i)^2 / ds` with `w = 1`
//! except `w = 1.5` at the two extreme interior nodes, the trapezoid rule
//! with end curvatures extrapolated from the neighbouring node.
//!
//! The Hessian block in the angles is tridiagonal; the KKT system is solved
//! by eliminating it against the few border columns (length and
//! constraints), and the inertia is read off the tridiagonal pivots plus the
//! Schur complement.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::sqp::{KktFactor, Nlp};

pub(crate) struct AngleProblem {
    pub n: usize,
    pub dx: f64,
    pub dy: f64,
    pub theta_start: f64,
    pub theta_end: f64,
    /// `Some(L)` for fixed length, `None` when `L` is the last unknown.
    pub fixed_length: Option<f64>,
    /// Length penalty (zero for fixed length).
    pub lambda: f64,
}

impl AngleProblem {
    fn weight(&self, i: usize) -> f64 {
        // Difference i couples theta_i and theta_{i+1}, i = 0..n-2 (0-based).
        if i == 0 || i + 2 == self.n {
            1.5
        } else {
            1.0
        }
    }

    pub fn length(&self, x: &[f64]) -> f64 {
        self.fixed_length.unwrap_or_else(|| x[self.n])
    }

    pub fn quadratic(&self, theta: &[f64]) -> f64 {
        (0..self.n - 1).map(|i| self.weight(i) * (theta[i + 1] - theta[i]).powi(2)).sum()
    }

    /// `W theta` where `Q = theta^T W theta`.
    fn w_times(&self, theta: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for i in 0..self.n - 1 {
            let d = self.weight(i) * (theta[i + 1] - theta[i]);
            out[i] -= d;
            out[i + 1] += d;
        }
        out
    }

    fn free_length(&self) -> bool {
        self.fixed_length.is_none()
    }
}

impl Nlp for AngleProblem {
    type Factor = BorderedFactor;

    fn n_constraints(&self) -> usize {
        4
    }

    fn objective(&self, x: &[f64]) -> f64 {
        let l = self.length(x);
        self.n as f64 * self.quadratic(&x[..self.n]) / l + self.lambda * if self.free_length() { l } else { 0.0 }
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n as f64;
        let l = self.length(x);
        let theta = &x[..self.n];
        let mut g: Vec<f64> = self.w_times(theta).iter().map(|v| 2.0 * n / l * v).collect();
        if self.free_length() {
            g.push(-n * self.quadratic(theta) / (l * l) + self.lambda);
        }
        g
    }

    fn constraints(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let l = self.length(x);
        let th = &x[..n];
        let (sc, ss) = th.iter().fold((0.0, 0.0), |(a, b), t| (a + t.cos(), b + t.sin()));
        vec![
            l / n as f64 * sc - self.dx,
            l / n as f64 * ss - self.dy,
            1.5 * th[0] - 0.5 * th[1] - self.theta_start,
            1.5 * th[n - 1] - 0.5 * th[n - 2] - self.theta_end,
        ]
    }

    fn jacobian_transpose_times(&self, x: &[f64], mu: &[f64]) -> Vec<f64> {
        let n = self.n;
        let l = self.length(x);
        let h = l / n as f64;
        let mut out: Vec<f64> = x[..n].iter().map(|t| h * (-mu[0] * t.sin() + mu[1] * t.cos())).collect();
        out[0] += 1.5 * mu[2];
        out[1] -= 0.5 * mu[2];
        out[n - 1] += 1.5 * mu[3];
        out[n - 2] -= 0.5 * mu[3];
        if self.free_length() {
            let (sc, ss) = x[..n].iter().fold((0.0, 0.0), |(a, b), t| (a + t.cos(), b + t.sin()));
            out.push((mu[0] * sc + mu[1] * ss) / n as f64);
        }
        out
    }

    fn hessian_scale(&self, x: &[f64]) -> f64 {
        4.0 * self.n as f64 / self.length(x)
    }

    fn max_step(&self, x: &[f64], d: &[f64]) -> f64 {
        if self.free_length() && d[self.n] < 0.0 {
            // Keep L at least half its current value.
            (0.5 * x[self.n] / -d[self.n]).min(1.0)
        } else {
            1.0
        }
    }

    fn factorize(&self, x: &[f64], mu: &[f64], tau: f64) -> Option<(BorderedFactor, usize)> {
        let n = self.n;
        let nf = n as f64;
        let l = self.length(x);
        let h = l / nf;
        let th = &x[..n];
        let s = 2.0 * nf / l;

        // Tridiagonal block: (2N/L) W + mu1 h diag(cos) + mu2 h diag(sin) + tau.
        let mut diag = vec![tau; n];
        let mut off = vec![0.0; n - 1];
        for i in 0..n - 1 {
            let w = self.weight(i);
            diag[i] += s * w;
            diag[i + 1] += s * w;
            off[i] = -s * w;
        }
        for i in 0..n {
            diag[i] += h * (mu[0] * th[i].cos() + mu[1] * th[i].sin());
        }
        // W annihilates constants. Adding rho (e3 e3^T + e4 e4^T) from the
        // linear end-angle rows fixes that without changing the solution or
        // the inertia of the KKT matrix, and keeps the block tridiagonal.
        let rho = s;
        for (a, b) in [(0, 1), (n - 1, n - 2)] {
            diag[a] += 2.25 * rho;
            diag[b] += 0.25 * rho;
            off[a.min(b)] -= 0.75 * rho;
        }

        // Border columns: [L column if free] then J_theta^T (4 columns).
        let free = self.free_length();
        let k = 4 + usize::from(free);
        let mut border: Vec<Vec<f64>> = Vec::with_capacity(k);
        if free {
            let wt = self.w_times(th);
            border.push(
                (0..n)
                    .map(|i| -2.0 * nf * wt[i] / (l * l) + (mu[0] * th[i].sin() - mu[1] * th[i].cos()) / nf)
                    .collect(),
            );
        }
        border.push(th.iter().map(|t| -h * t.sin()).collect());
        border.push(th.iter().map(|t| h * t.cos()).collect());
        let mut e3 = vec![0.0; n];
        e3[0] = 1.5;
        e3[1] = -0.5;
        let mut e4 = vec![0.0; n];
        e4[n - 1] = 1.5;
        e4[n - 2] = -0.5;
        border.push(e3);
        border.push(e4);

        // Corner block (the shift is on the constraint columns only).
        let mut corner = DMatrix::<f64>::zeros(k, k);
        if free {
            let (sc, ss) = th.iter().fold((0.0, 0.0), |(a, b), t| (a + t.cos(), b + t.sin()));
            corner[(0, 0)] = 2.0 * nf * self.quadratic(th) / l.powi(3) + tau;
            corner[(0, 1)] = sc / nf;
            corner[(1, 0)] = sc / nf;
            corner[(0, 2)] = ss / nf;
            corner[(2, 0)] = ss / nf;
        }

        let tri = TridiagonalLdl::new(&diag, &off)?;
        let tinv_border: Vec<Vec<f64>> = border.iter().map(|b| tri.solve(b)).collect();
        let mut schur = corner;
        for a in 0..k {
            for b in 0..k {
                let dot: f64 = border[a].iter().zip(&tinv_border[b]).map(|(u, v)| u * v).sum();
                schur[(a, b)] -= dot;
            }
        }
        // Symmetrize against roundoff before the eigensolve.
        let schur = 0.5 * (&schur + schur.transpose());
        let eig = SymmetricEigen::new(schur);
        let big = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if eig.eigenvalues.iter().any(|v| v.abs() <= 1e-13 * big.max(1e-300)) {
            return None;
        }
        let neg = tri.negative_pivots() + eig.eigenvalues.iter().filter(|v| **v < 0.0).count();
        Some((
            BorderedFactor {
                n,
                free,
                rho,
                tri,
                border,
                tinv_border,
                eig,
            },
            neg,
        ))
    }
}

/// `L D L^T` of a symmetric tridiagonal matrix without pivoting.
pub(crate) struct TridiagonalLdl {
    d: Vec<f64>,
    l: Vec<f64>,
}

impl TridiagonalLdl {
    pub fn new(diag: &[f64], off: &[f64]) -> Option<Self> {
        let n = diag.len();
        let scale = diag.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        let mut d = vec![0.0; n];
        let mut l = vec![0.0; n.saturating_sub(1)];
        d[0] = diag[0];
        for i in 1..n {
            if d[i - 1].abs() <= 1e-14 * scale {
                return None;
            }
            l[i - 1] = off[i - 1] / d[i - 1];
            d[i] = diag[i] - l[i - 1] * off[i - 1];
        }
        if d[n - 1].abs() <= 1e-14 * scale || d.iter().any(|v| !v.is_finite()) {
            return None;
        }
        Some(Self { d, l })
    }

    pub fn negative_pivots(&self) -> usize {
        self.d.iter().filter(|v| **v < 0.0).count()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut y = b.to_vec();
        for i in 1..n {
            y[i] -= self.l[i - 1] * y[i - 1];
        }
        for i in 0..n {
            y[i] /= self.d[i];
        }
        for i in (0..n - 1).rev() {
            y[i] -= self.l[i] * y[i + 1];
        }
        y
    }
}

pub(crate) struct BorderedFactor {
    n: usize,
    free: bool,
    rho: f64,
    tri: TridiagonalLdl,
    border: Vec<Vec<f64>>,
    tinv_border: Vec<Vec<f64>>,
    eig: SymmetricEigen<f64, nalgebra::Dyn>,
}

impl KktFactor for BorderedFactor {
    fn solve(&self, rx: &[f64], rc: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let k = self.border.len();
        let mut r_theta = rx[..n].to_vec();
        r_theta[0] += 1.5 * self.rho * rc[2];
        r_theta[1] -= 0.5 * self.rho * rc[2];
        r_theta[n - 1] += 1.5 * self.rho * rc[3];
        r_theta[n - 2] -= 0.5 * self.rho * rc[3];
        let mut rb: Vec<f64> = Vec::with_capacity(k);
        if self.free {
            rb.push(rx[n]);
        }
        rb.extend_from_slice(rc);
        let z = self.tri.solve(&r_theta);
        let rhs = DVector::from_iterator(
            k,
            (0..k).map(|a| rb[a] - self.border[a].iter().zip(&z).map(|(u, v)| u * v).sum::<f64>()),
        );
        // M^{-1} rhs via the eigendecomposition.
        let q = &self.eig.eigenvectors;
        let mut coef = q.transpose() * rhs;
        for (c, lam) in coef.iter_mut().zip(self.eig.eigenvalues.iter()) {
            *c /= lam;
        }
        let yb = q * coef;
        let mut d_theta = z;
        for a in 0..k {
            for (di, ti) in d_theta.iter_mut().zip(&self.tinv_border[a]) {
                *di -= ti * yb[a];
            }
        }
        let mut d = d_theta;
        let offset = usize::from(self.free);
        if self.free {
            d.push(yb[0]);
        }
        let y = (0..4).map(|i| yb[offset + i]).collect();
        (d, y)
    }
}
