use super::{dist, DiscreteCurve};
use crate::Result;

/// Discrete bending energy `int |kappa|^2 ds`.
///
/// Curvature vectors come from second differences on the constant-speed
/// grid, integrated with the trapezoidal rule.
pub fn bending_energy(curve: &DiscreteCurve) -> Result<f64> {
    curve.require_constant_speed()?;
    let ds = curve.length() / curve.segments() as f64;
    Ok(trapezoid(curve.curvature_vectors().iter().map(|k| super::dot(k, k)), ds))
}

fn trapezoid(values: impl ExactSizeIterator<Item = f64>, h: f64) -> f64 {
    let n = values.len();
    values
        .enumerate()
        .map(|(i, v)| if i == 0 || i + 1 == n { 0.5 * v } else { v })
        .sum::<f64>()
        * h
}

/// Both sides of `B = L^{-3} int_0^1 |d^2 gamma / dx^2|^2 dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyIdentity {
    /// Bending energy from turning angles (`k_i = phi_i / ds`).
    pub from_turning: f64,
    /// `L^{-3} int |gamma_xx|^2 dx` from second differences in `x`.
    pub from_parameter: f64,
    /// `|from_turning - from_parameter| / from_turning`, or `0` when both vanish.
    pub discrepancy: f64,
}

/// Evaluates the constant-speed energy identity with two independent
/// discretizations.
pub fn energy_identity_check(curve: &DiscreteCurve) -> Result<EnergyIdentity> {
    curve.require_constant_speed()?;
    let n = curve.segments();
    let l = curve.length();
    let ds = l / n as f64;

    // Turning-angle curvature at interior nodes, linearly extrapolated to
    // the ends.
    let angles = curve.turning_angles();
    let mut k: Vec<f64> = Vec::with_capacity(n + 1);
    k.push(0.0);
    k.extend(angles.iter().map(|a| a.abs() / ds));
    k.push(0.0);
    k[0] = 2.0 * k[1] - k[2];
    k[n] = 2.0 * k[n - 1] - k[n - 2];
    let from_turning = trapezoid(k.iter().map(|v| v * v), ds);

    let h = 1.0 / n as f64;
    let p = curve.nodes();
    let second = |i: usize| -> f64 {
        let mut s = 0.0;
        for c in 0..3 {
            let v = if i == 0 {
                2.0 * p[0][c] - 5.0 * p[1][c] + 4.0 * p[2][c] - p[3][c]
            } else if i == n {
                2.0 * p[n][c] - 5.0 * p[n - 1][c] + 4.0 * p[n - 2][c] - p[n - 3][c]
            } else {
                p[i + 1][c] - 2.0 * p[i][c] + p[i - 1][c]
            };
            s += (v / (h * h)).powi(2);
        }
        s
    };
    let from_parameter = trapezoid((0..n + 1).map(second), h) / l.powi(3);

    let discrepancy = if from_turning == 0.0 && from_parameter == 0.0 {
        0.0
    } else {
        (from_turning - from_parameter).abs() / from_turning.max(from_parameter)
    };
    Ok(EnergyIdentity {
        from_turning,
        from_parameter,
        discrepancy,
    })
}

/// `(sqrt(L B), |T(1) - T(0)|)`; Cauchy-Schwarz gives `lhs >= rhs`.
pub fn tangent_turn_bound_check(curve: &DiscreteCurve) -> Result<(f64, f64)> {
    let b = bending_energy(curve)?;
    let (t0, t1) = curve.end_tangents();
    Ok(((curve.length() * b).sqrt(), dist(&t1, &t0)))
}
