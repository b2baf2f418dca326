//! Euler-Lagrange residual `2 nabla_s^2 kappa + |kappa|^2 kappa - lambda kappa`.
//!
//! For an arclength parametrization the normal derivatives expand to
//! `nabla_s^2 kappa = (gamma'''')^perp + |kappa|^2 kappa`, so the residual is
//! `2 (gamma'''')^perp + 3 |kappa|^2 kappa - lambda kappa`. Derivatives up to
//! fourth order are taken with fourth-order central stencils on a strided
//! subgrid: with unit stride, the roundoff in a fourth difference grows like
//! `eps N^4`, which already swamps the residual at `N = 4096`.

use super::{dot, scale, DiscreteCurve, Point};
use crate::{Error, Result};

/// Fewest segments accepted by the residual.
pub const MIN_RESIDUAL_SEGMENTS: usize = 64;

/// Subgrid spacing target: roughly this many strided intervals per curve.
const TARGET_INTERVALS: usize = 256;

#[derive(Debug, Clone)]
pub struct ElResidual {
    /// Indices of the nodes where the residual was evaluated.
    pub nodes: Vec<usize>,
    /// Residual vector at each evaluated node.
    pub field: Vec<Point>,
    /// `L^2(ds)` norm of the residual over the evaluated nodes.
    pub norm: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct MultiplierEstimate {
    pub lambda: f64,
    /// Residual `L^2` norm at the least-squares optimum.
    pub residual: f64,
}

/// Default stride for a curve with `n` segments.
pub fn default_stride(n: usize) -> usize {
    (n / TARGET_INTERVALS).max(1)
}

/// Per-node data needed by both the residual and the multiplier fit.
struct Terms {
    nodes: Vec<usize>,
    /// `2 (gamma'''')^perp + 3 |kappa|^2 kappa`.
    lambda_free: Vec<Point>,
    kappa: Vec<Point>,
    ds: f64,
}

fn terms(curve: &DiscreteCurve, stride: usize) -> Result<Terms> {
    let n = curve.segments();
    if n < MIN_RESIDUAL_SEGMENTS {
        return Err(Error::Resolution {
            needed: MIN_RESIDUAL_SEGMENTS,
            got: n,
        });
    }
    if stride == 0 || 6 * stride + 10 >= n {
        return Err(Error::InvalidArgument(format!("stride {stride} too large for {n} segments")));
    }
    curve.require_constant_speed()?;
    let ds = curve.length() / n as f64;
    let h = ds * stride as f64;
    let p = curve.nodes();
    // Stencils reach 3 strides out; keep them off the first and last five
    // nodes, where clamped discretizations are typically not smooth.
    let skip = 3 * stride + 5;

    let mut out = Terms {
        nodes: Vec::new(),
        lambda_free: Vec::new(),
        kappa: Vec::new(),
        ds,
    };
    for i in skip..=(n - skip) {
        let f = |k: isize| -> &Point { &p[(i as isize + k * stride as isize) as usize] };
        let mut d1 = [0.0; 3];
        let mut d2 = [0.0; 3];
        let mut d4 = [0.0; 3];
        for c in 0..3 {
            let (m3, m2, m1, z, p1, p2, p3) = (f(-3)[c], f(-2)[c], f(-1)[c], f(0)[c], f(1)[c], f(2)[c], f(3)[c]);
            d1[c] = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
            d2[c] = (-p2 + 16.0 * p1 - 30.0 * z + 16.0 * m1 - m2) / (12.0 * h * h);
            d4[c] = (-p3 + 12.0 * p2 - 39.0 * p1 + 56.0 * z - 39.0 * m1 + 12.0 * m2 - m3) / (6.0 * h.powi(4));
        }
        let t = scale(&d1, 1.0 / dot(&d1, &d1).sqrt());
        let kappa = perp(&d2, &t);
        let d4n = perp(&d4, &t);
        let k2 = dot(&kappa, &kappa);
        let mut lf = [0.0; 3];
        for c in 0..3 {
            lf[c] = 2.0 * d4n[c] + 3.0 * k2 * kappa[c];
        }
        out.nodes.push(i);
        out.lambda_free.push(lf);
        out.kappa.push(kappa);
    }
    Ok(out)
}

fn perp(v: &Point, t: &Point) -> Point {
    let a = dot(v, t);
    [v[0] - a * t[0], v[1] - a * t[1], v[2] - a * t[2]]
}

/// Residual of the elastica equation with multiplier `lambda`, using the
/// default stride.
pub fn el_residual(curve: &DiscreteCurve, lambda: f64) -> Result<ElResidual> {
    el_residual_with_stride(curve, lambda, default_stride(curve.segments()))
}

pub fn el_residual_with_stride(curve: &DiscreteCurve, lambda: f64, stride: usize) -> Result<ElResidual> {
    let t = terms(curve, stride)?;
    let field: Vec<Point> = t
        .lambda_free
        .iter()
        .zip(&t.kappa)
        .map(|(a, k)| [a[0] - lambda * k[0], a[1] - lambda * k[1], a[2] - lambda * k[2]])
        .collect();
    let norm = (field.iter().map(|r| dot(r, r)).sum::<f64>() * t.ds).sqrt();
    Ok(ElResidual {
        nodes: t.nodes,
        field,
        norm,
    })
}

/// Least-squares multiplier `<2 (gamma'''')^perp + 3|kappa|^2 kappa, kappa> / |kappa|^2`.
pub fn estimate_multiplier(curve: &DiscreteCurve) -> Result<MultiplierEstimate> {
    let t = terms(curve, default_stride(curve.segments()))?;
    let kk: f64 = t.kappa.iter().map(|k| dot(k, k)).sum::<f64>() * t.ds;
    // |kappa|^2 integrated against ds, scaled to a dimensionless number.
    if kk * curve.length() < 1e-10 {
        return Err(Error::Degenerate("curve is a segment; the multiplier is arbitrary".into()));
    }
    let ak: f64 = t.lambda_free.iter().zip(&t.kappa).map(|(a, k)| dot(a, k)).sum::<f64>() * t.ds;
    let lambda = ak / kk;
    let residual = t
        .lambda_free
        .iter()
        .zip(&t.kappa)
        .map(|(a, k)| {
            let r = [a[0] - lambda * k[0], a[1] - lambda * k[1], a[2] - lambda * k[2]];
            dot(&r, &r)
        })
        .sum::<f64>()
        * t.ds;
    Ok(MultiplierEstimate {
        lambda,
        residual: residual.sqrt(),
    })
}
