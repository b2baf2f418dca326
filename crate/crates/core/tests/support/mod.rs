//! Independent numerical oracles shared by the integration tests.
//!
//! Nothing here calls into the library: quadrature, the amplitude inversion
//! and the curve integrator are written from scratch so they can check it.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Adaptive Simpson quadrature with Richardson correction.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// `K(m)` from its integral definition.
pub fn k_quad(m: f64) -> f64 {
    integrate(&|t: f64| 1.0 / (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, PI / 2.0, 1e-14)
}

/// `E(m)` from its integral definition.
pub fn e_quad(m: f64) -> f64 {
    integrate(&|t: f64| (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, PI / 2.0, 1e-14)
}

/// `int_0^{2K} cn^2 du`, substituting `u = F(phi)` so that `cn = cos(phi)`.
pub fn cn2_period_quad(m: f64) -> f64 {
    integrate(&|t: f64| t.cos().powi(2) / (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, PI, 1e-14)
}

/// Incomplete integral of the first kind `F(phi | m)` by quadrature.
pub fn f_quad(phi: f64, m: f64) -> f64 {
    integrate(&|t: f64| 1.0 / (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, phi, 1e-14)
}

/// Jacobi amplitude by Newton iteration on `F(phi) = u` (`m < 1`).
pub fn amplitude(u: f64, m: f64) -> f64 {
    let mut phi = u;
    for _ in 0..60 {
        let r = f_quad(phi, m) - u;
        phi -= r * (1.0 - m * phi.sin().powi(2)).sqrt();
        if r.abs() < 1e-15 {
            break;
        }
    }
    phi
}

/// `(sn, cn, dn)` from the amplitude.
pub fn jacobi_oracle(u: f64, m: f64) -> (f64, f64, f64) {
    let phi = amplitude(u, m);
    (phi.sin(), phi.cos(), (1.0 - m * phi.sin().powi(2)).sqrt())
}

/// Planar curve with signed curvature `k(s)` from the origin with tangent
/// `e1`, integrated with classical RK4 on `(x, y, theta)` and sampled at
/// `n + 1` equally spaced arclengths.
pub fn integrate_planar(k: &dyn Fn(f64) -> f64, length: f64, n: usize) -> Vec<[f64; 2]> {
    let h = length / n as f64;
    let rhs = |s: f64, y: [f64; 3]| [y[2].cos(), y[2].sin(), k(s)];
    let mut y = [0.0, 0.0, 0.0];
    let mut out = vec![[0.0, 0.0]];
    for i in 0..n {
        let s = i as f64 * h;
        let k1 = rhs(s, y);
        let k2 = rhs(s + 0.5 * h, add(y, k1, 0.5 * h));
        let k3 = rhs(s + 0.5 * h, add(y, k2, 0.5 * h));
        let k4 = rhs(s + h, add(y, k3, h));
        for c in 0..3 {
            y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        out.push([y[0], y[1]]);
    }
    out
}

fn add(y: [f64; 3], d: [f64; 3], h: f64) -> [f64; 3] {
    [y[0] + h * d[0], y[1] + h * d[1], y[2] + h * d[2]]
}

/// Relative difference with an absolute floor of one.
pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}
