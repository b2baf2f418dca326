use nalgebra::{Matrix3, Vector3};

use super::ElasticaParams;
use crate::curve::{cross, dot, norm, scale, sub, DiscreteCurve, Point};
use crate::{Error, Result};

/// A straight line `point + t * direction`, `|direction| = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KillingAxis {
    pub point: Point,
    pub direction: Point,
}

impl KillingAxis {
    pub fn distance(&self, q: &Point) -> f64 {
        let d = sub(q, &self.point);
        let along = dot(&d, &self.direction);
        norm(&sub(&d, &scale(&self.direction, along))).max(0.0)
    }
}

/// Locates the Killing axis of a reconstruction produced by
/// [`super::reconstruct`] (starting at the origin with the standard frame).
///
/// The direction is `J = (k^2 - lambda) T + 2 k_s N + 2 k t B` at `s = 0`.
/// The position of the axis is not determined by the moduli alone, so it is
/// fitted: in 3D by linear least squares on `|q - p|^2 = r(s)^2` in the
/// plane orthogonal to the axis, in 2D by the signed offset `+-2k/a`.
pub fn fit_killing_axis(p: &ElasticaParams, curve: &DiscreteCurve) -> Result<KillingAxis> {
    let a = p.killing_magnitude()?;
    let n = curve.segments();
    let l = curve.length();
    let s_of = |i: usize| l * i as f64 / n as f64;

    if p.family.is_planar() {
        let (k, dk) = p.signed_curvature_and_derivative(0.0)?;
        let e = [(k * k - p.lambda) / a, 2.0 * dk / a, 0.0];
        let normal = [-e[1], e[0], 0.0];
        let mut best: Option<(f64, f64)> = None;
        for sign in [1.0, -1.0] {
            let offsets: Vec<f64> = (0..=n)
                .map(|i| dot(&normal, &curve.nodes()[i]) - sign * 2.0 * p.signed_curvature(s_of(i)).unwrap() / a)
                .collect();
            let mean = offsets.iter().sum::<f64>() / offsets.len() as f64;
            let spread = offsets.iter().map(|o| (o - mean).powi(2)).sum::<f64>();
            if best.map_or(true, |(_, s)| spread < s) {
                best = Some((mean, spread));
            }
        }
        let (offset, _) = best.unwrap();
        return Ok(KillingAxis {
            point: scale(&normal, offset),
            direction: e,
        });
    }

    let (k, dk) = p.unsigned_curvature_and_derivative(0.0);
    let t = p.torsion(0.0)?;
    let e = [(k * k - p.lambda) / a, 2.0 * dk / a, 2.0 * k * t / a];
    // Orthonormal basis (u, v) of the plane orthogonal to e.
    let helper = if e[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let u = {
        let c = cross(&e, &helper);
        scale(&c, 1.0 / norm(&c))
    };
    let v = cross(&e, &u);
    // 2 q.p - rho = |q|^2 - r^2 with unknowns (p_u, p_v, rho = |p|^2).
    let mut ata = Matrix3::<f64>::zeros();
    let mut atb = Vector3::<f64>::zeros();
    for i in 0..=n {
        let q = &curve.nodes()[i];
        let (qu, qv) = (dot(q, &u), dot(q, &v));
        let r = p.cylindrical_radius(s_of(i))?;
        let row = Vector3::new(2.0 * qu, 2.0 * qv, -1.0);
        ata += row * row.transpose();
        atb += row * (qu * qu + qv * qv - r * r);
    }
    let sol = ata
        .cholesky()
        .ok_or_else(|| Error::Degenerate("axis fit is singular".into()))?
        .solve(&atb);
    let point = [
        sol[0] * u[0] + sol[1] * v[0],
        sol[0] * u[1] + sol[1] * v[1],
        sol[0] * u[2] + sol[1] * v[2],
    ];
    Ok(KillingAxis { point, direction: e })
}
