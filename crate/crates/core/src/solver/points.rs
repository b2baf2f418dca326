//! Node-position problems in `R^2` or `R^3`.
//!
//! Unknowns are the interior nodes `x_1..x_{N-1}` (plus `L` when free); the
//! end nodes are the clamped positions. Constraints are the edge lengths,
//! `(|x_{i+1} - x_i|^2 - h^2) / 2h = 0` with `h = L/N`, and, at each end, the components of
//! the extrapolated end tangent orthogonal to the prescribed one. The
//! energy is `(N/L)^3 sum_i w_i |x_{i+1} - 2 x_i + x_{i-1}|^2` with the same
//! weights as the angle problem. The KKT system is dense.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::sqp::{KktFactor, Nlp};
use crate::curve::{cross, dot, slerp, unit, Point};

pub(crate) struct PointsProblem {
    pub dim: usize,
    pub n: usize,
    pub p0: Point,
    pub p1: Point,
    /// Orthonormal bases of the complements of `V0` and `V1`.
    pub perp0: Vec<Point>,
    pub perp1: Vec<Point>,
    pub fixed_length: Option<f64>,
    pub lambda: f64,
}

/// Basis of the orthogonal complement of the unit vector `v` in `R^dim`.
pub(crate) fn complement_basis(v: &Point, dim: usize) -> Vec<Point> {
    if dim == 2 {
        return vec![[-v[1], v[0], 0.0]];
    }
    let helper = if v[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let a = unit(&cross(v, &helper));
    let b = cross(v, &a);
    vec![a, b]
}

impl PointsProblem {
    fn n_free_coords(&self) -> usize {
        self.dim * (self.n - 1)
    }

    fn free(&self) -> bool {
        self.fixed_length.is_none()
    }

    pub fn length(&self, x: &[f64]) -> f64 {
        self.fixed_length.unwrap_or_else(|| x[self.n_free_coords()])
    }

    pub fn nodes(&self, x: &[f64]) -> Vec<Point> {
        let d = self.dim;
        let mut out = Vec::with_capacity(self.n + 1);
        out.push(self.p0);
        for i in 0..self.n - 1 {
            let mut p = [0.0; 3];
            p[..d].copy_from_slice(&x[d * i..d * i + d]);
            out.push(p);
        }
        out.push(self.p1);
        out
    }

    /// Variable index of coordinate `c` of node `i`, if the node is free.
    fn var(&self, i: usize, c: usize) -> Option<usize> {
        (i >= 1 && i < self.n).then(|| self.dim * (i - 1) + c)
    }

    fn weight(&self, i: usize) -> f64 {
        if i == 1 || i + 1 == self.n {
            1.5
        } else {
            1.0
        }
    }

    fn bending_sum(&self, p: &[Point]) -> f64 {
        (1..self.n)
            .map(|i| {
                let mut s = 0.0;
                for c in 0..self.dim {
                    s += (p[i + 1][c] - 2.0 * p[i][c] + p[i - 1][c]).powi(2);
                }
                self.weight(i) * s
            })
            .sum()
    }

    /// Gradient of `bending_sum` with respect to all nodes.
    fn bending_sum_gradient(&self, p: &[Point]) -> Vec<Point> {
        let mut g = vec![[0.0; 3]; self.n + 1];
        for i in 1..self.n {
            let w = 2.0 * self.weight(i);
            for c in 0..self.dim {
                let d2 = p[i + 1][c] - 2.0 * p[i][c] + p[i - 1][c];
                g[i + 1][c] += w * d2;
                g[i][c] -= 2.0 * w * d2;
                g[i - 1][c] += w * d2;
            }
        }
        g
    }

    fn end_tangent_values(&self, p: &[Point]) -> Vec<f64> {
        let n = self.n;
        let e = |i: usize| unit(&crate::curve::sub(&p[i + 1], &p[i]));
        let t0 = slerp(&e(1), &e(0), 1.5);
        let t1 = slerp(&e(n - 2), &e(n - 1), 1.5);
        self.perp0
            .iter()
            .map(|b| dot(&t0, b))
            .chain(self.perp1.iter().map(|b| dot(&t1, b)))
            .collect()
    }

    /// Free variables entering the tangent constraints at each end.
    fn tangent_vars(&self) -> [Vec<usize>; 2] {
        let n = self.n;
        let near = |nodes: [usize; 2]| -> Vec<usize> {
            nodes
                .iter()
                .flat_map(|&i| (0..self.dim).filter_map(move |c| self.var(i, c)))
                .collect()
        };
        [near([1, 2]), near([n - 2, n - 1])]
    }

    /// Tangent constraint rows by central differences: `(row, var, value)`.
    fn tangent_jacobian(&self, x: &[f64]) -> Vec<(usize, usize, f64)> {
        let h = 1e-7;
        let mut out = Vec::new();
        let rows0 = self.perp0.len();
        for (end, vars) in self.tangent_vars().iter().enumerate() {
            for &v in vars {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[v] += h;
                xm[v] -= h;
                let (cp, cm) = (self.end_tangent_values(&self.nodes(&xp)), self.end_tangent_values(&self.nodes(&xm)));
                let range = if end == 0 { 0..rows0 } else { rows0..cp.len() };
                for r in range {
                    out.push((r, v, (cp[r] - cm[r]) / (2.0 * h)));
                }
            }
        }
        out
    }

    /// Hessian of `sum_r mu_r t_r(x)` over the tangent variables, by
    /// differencing the tangent Jacobian.
    fn tangent_hessian(&self, x: &[f64], mu_t: &[f64]) -> Vec<(usize, usize, f64)> {
        let h = 1e-4;
        let grad = |x: &[f64]| -> Vec<(usize, f64)> {
            let mut acc: Vec<(usize, f64)> = Vec::new();
            for (r, v, val) in self.tangent_jacobian(x) {
                match acc.iter_mut().find(|(i, _)| *i == v) {
                    Some(e) => e.1 += mu_t[r] * val,
                    None => acc.push((v, mu_t[r] * val)),
                }
            }
            acc
        };
        let mut out = Vec::new();
        for vars in self.tangent_vars() {
            for &v in &vars {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[v] += h;
                xm[v] -= h;
                let (gp, gm) = (grad(&xp), grad(&xm));
                for &u in &vars {
                    let a = gp.iter().find(|(i, _)| *i == u).map_or(0.0, |e| e.1);
                    let b = gm.iter().find(|(i, _)| *i == u).map_or(0.0, |e| e.1);
                    out.push((u, v, (a - b) / (2.0 * h)));
                }
            }
        }
        out
    }
}

impl Nlp for PointsProblem {
    type Factor = DenseFactor;

    fn n_constraints(&self) -> usize {
        self.n + self.perp0.len() + self.perp1.len()
    }

    fn objective(&self, x: &[f64]) -> f64 {
        let l = self.length(x);
        let s = self.bending_sum(&self.nodes(x));
        (self.n as f64 / l).powi(3) * s + if self.free() { self.lambda * l } else { 0.0 }
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let l = self.length(x);
        let nodes = self.nodes(x);
        let scale = (self.n as f64 / l).powi(3);
        let gs = self.bending_sum_gradient(&nodes);
        let mut g = vec![0.0; x.len()];
        for i in 1..self.n {
            for c in 0..self.dim {
                g[self.var(i, c).unwrap()] = scale * gs[i][c];
            }
        }
        if self.free() {
            let s = self.bending_sum(&nodes);
            g[self.n_free_coords()] = -3.0 * scale * s / l + self.lambda;
        }
        g
    }

    fn constraints(&self, x: &[f64]) -> Vec<f64> {
        let l = self.length(x);
        let h = l / self.n as f64;
        let p = self.nodes(x);
        let mut c: Vec<f64> = p
            .windows(2)
            .map(|w| {
                let e = crate::curve::sub(&w[1], &w[0]);
                (dot(&e, &e) - h * h) / (2.0 * h)
            })
            .collect();
        c.extend(self.end_tangent_values(&p));
        c
    }

    fn jacobian_transpose_times(&self, x: &[f64], mu: &[f64]) -> Vec<f64> {
        let j = self.jacobian(x);
        (j.transpose() * DVector::from_column_slice(mu)).iter().copied().collect()
    }

    fn hessian_scale(&self, x: &[f64]) -> f64 {
        16.0 * (self.n as f64 / self.length(x)).powi(3)
    }

    fn max_step(&self, x: &[f64], d: &[f64]) -> f64 {
        let k = self.n_free_coords();
        if self.free() && d[k] < 0.0 {
            (0.5 * x[k] / -d[k]).min(1.0)
        } else {
            1.0
        }
    }

    fn factorize(&self, x: &[f64], mu: &[f64], tau: f64) -> Option<(DenseFactor, usize)> {
        let nv = x.len();
        let m = self.n_constraints();
        let l = self.length(x);
        let nodes = self.nodes(x);
        let nf = self.n as f64;
        let scale = (nf / l).powi(3);
        let mut k = DMatrix::<f64>::zeros(nv + m, nv + m);

        // Objective Hessian: 2 scale w (second-difference stencil)^T (stencil).
        for i in 1..self.n {
            let w = 2.0 * scale * self.weight(i);
            let idx = [i - 1, i, i + 1];
            let coef = [1.0, -2.0, 1.0];
            for c in 0..self.dim {
                for (a, &na) in idx.iter().enumerate() {
                    for (b, &nb) in idx.iter().enumerate() {
                        if let (Some(u), Some(v)) = (self.var(na, c), self.var(nb, c)) {
                            k[(u, v)] += w * coef[a] * coef[b];
                        }
                    }
                }
            }
        }
        // Edge constraints: -mu_i * hess (|x_{i+1} - x_i|^2 - h^2) / 2h.
        let h = l / nf;
        for i in 0..self.n {
            let w = -mu[i] / h;
            for c in 0..self.dim {
                let (a, b) = (self.var(i, c), self.var(i + 1, c));
                if let Some(a) = a {
                    k[(a, a)] += w;
                }
                if let Some(b) = b {
                    k[(b, b)] += w;
                }
                if let (Some(a), Some(b)) = (a, b) {
                    k[(a, b)] -= w;
                    k[(b, a)] -= w;
                }
            }
        }
        // Tangent constraints.
        let mu_t = &mu[self.n..];
        for (u, v, val) in self.tangent_hessian(x, mu_t) {
            k[(u, v)] -= val;
        }
        if self.free() {
            let kl = self.n_free_coords();
            let s = self.bending_sum(&nodes);
            let gs = self.bending_sum_gradient(&nodes);
            k[(kl, kl)] += 12.0 * scale * s / (l * l);
            // c_i = |e|^2 N / 2L - L / 2N: d2c/dL2 = |e|^2 N / L^3,
            // d2c/dL de = -e N / L^2.
            for i in 0..self.n {
                let e = crate::curve::sub(&nodes[i + 1], &nodes[i]);
                k[(kl, kl)] -= mu[i] * dot(&e, &e) * nf / l.powi(3);
                for c in 0..self.dim {
                    let g = mu[i] * e[c] * nf / (l * l);
                    if let Some(a) = self.var(i, c) {
                        k[(a, kl)] -= g;
                        k[(kl, a)] -= g;
                    }
                    if let Some(b) = self.var(i + 1, c) {
                        k[(b, kl)] += g;
                        k[(kl, b)] += g;
                    }
                }
            }
            for i in 1..self.n {
                for c in 0..self.dim {
                    let v = self.var(i, c).unwrap();
                    let val = -3.0 * scale * gs[i][c] / l;
                    k[(v, kl)] += val;
                    k[(kl, v)] += val;
                }
            }
        }
        for i in 0..nv {
            k[(i, i)] += tau;
        }
        // Balance the blocks by the congruence diag(I, sigma I), which keeps
        // the inertia: sigma^2 ~ |H| puts the saddle eigenvalues near the
        // Hessian scale instead of near |J|^2 / |H|.
        let sigma = self.hessian_scale(x).sqrt();
        let j = self.jacobian(x);
        for r in 0..m {
            for cidx in 0..nv {
                k[(nv + r, cidx)] = sigma * j[(r, cidx)];
                k[(cidx, nv + r)] = sigma * j[(r, cidx)];
            }
        }
        let k = 0.5 * (&k + k.transpose());
        let eig = SymmetricEigen::new(k);
        let big = eig.eigenvalues.amax().max(1e-300);
        if eig.eigenvalues.iter().any(|v| v.abs() <= 1e-14 * big || !v.is_finite()) {
            return None;
        }
        let neg = eig.eigenvalues.iter().filter(|v| **v < 0.0).count();
        Some((DenseFactor { nv, sigma, eig }, neg))
    }
}

impl PointsProblem {
    fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let nv = x.len();
        let m = self.n_constraints();
        let l = self.length(x);
        let p = self.nodes(x);
        let mut j = DMatrix::<f64>::zeros(m, nv);
        let h = l / self.n as f64;
        for i in 0..self.n {
            let e = crate::curve::sub(&p[i + 1], &p[i]);
            for c in 0..self.dim {
                if let Some(a) = self.var(i, c) {
                    j[(i, a)] -= e[c] / h;
                }
                if let Some(b) = self.var(i + 1, c) {
                    j[(i, b)] += e[c] / h;
                }
            }
            if self.free() {
                // d/dL of (|e|^2 - h^2) / 2h with h = L/N.
                j[(i, self.n_free_coords())] = -(dot(&e, &e) / (h * h) + 1.0) / (2.0 * self.n as f64);
            }
        }
        for (r, v, val) in self.tangent_jacobian(x) {
            j[(self.n + r, v)] = val;
        }
        j
    }
}

pub(crate) struct DenseFactor {
    nv: usize,
    sigma: f64,
    eig: SymmetricEigen<f64, nalgebra::Dyn>,
}

impl KktFactor for DenseFactor {
    fn solve(&self, rx: &[f64], rc: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let rhs = DVector::from_iterator(
            rx.len() + rc.len(),
            rx.iter().copied().chain(rc.iter().map(|v| self.sigma * v)),
        );
        let q = &self.eig.eigenvectors;
        let mut coef = q.transpose() * rhs;
        for (c, lam) in coef.iter_mut().zip(self.eig.eigenvalues.iter()) {
            *c /= lam;
        }
        let sol = q * coef;
        (
            sol.rows(0, self.nv).iter().copied().collect(),
            sol.rows(self.nv, rc.len()).iter().map(|v| self.sigma * v).collect(),
        )
    }
}
