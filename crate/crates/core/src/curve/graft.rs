use super::resample::resample_constant_speed;
use super::{dist, sub, BoundaryData, DiscreteCurve, Point};
use crate::{Error, Result};

/// Quintic smoothstep bump: `1` on `(-inf, 0]`, `0` on `[1, inf)`, `C^2` in
/// between.
pub fn cutoff(t: f64) -> f64 {
    if t <= 0.0 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
    }
}

/// Smallest chord, relative to the mean chord, accepted after blending.
const MIN_RELATIVE_CHORD: f64 = 0.05;

/// Deforms `curve` near its ends so that it satisfies the `target` clamped
/// boundary data, then resamples to constant speed.
///
/// Near `x = 0` the curve is shifted by `zeta(x / delta) (dP0 + x L dV0)`,
/// where `dP0`, `dV0` are the position and unit-tangent mismatches and `L`
/// the length; symmetrically near `x = 1`. Nodes with `delta <= x <= 1 -
/// delta` are untouched before the resampling.
pub fn boundary_graft(curve: &DiscreteCurve, target: &BoundaryData, delta: f64) -> Result<DiscreteCurve> {
    if !(delta > 0.0 && delta < 0.25) {
        return Err(Error::InvalidArgument(format!("graft width {delta} outside (0, 1/4)")));
    }
    if target.dim != curve.dim() {
        return Err(Error::DimensionMismatch(curve.dim(), target.dim));
    }
    curve.require_constant_speed()?;
    let n = curve.segments();
    let l = curve.length();
    let (v0, v1) = curve.end_tangents();
    let dp0 = sub(&target.p0, &curve.start());
    let dp1 = sub(&target.p1, &curve.end());
    let dv0 = sub(&target.v0, &v0);
    let dv1 = sub(&target.v1, &v1);

    let nodes: Vec<Point> = curve
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let x = i as f64 / n as f64;
            let (z0, z1) = (cutoff(x / delta), cutoff((1.0 - x) / delta));
            let mut q = *p;
            for c in 0..3 {
                q[c] += z0 * (dp0[c] + x * l * dv0[c]) + z1 * (dp1[c] - (1.0 - x) * l * dv1[c]);
            }
            q
        })
        .collect();

    let mean = nodes.windows(2).map(|w| dist(&w[0], &w[1])).sum::<f64>() / n as f64;
    let worst = nodes.windows(2).map(|w| dist(&w[0], &w[1])).fold(f64::INFINITY, f64::min);
    let folds = nodes.windows(3).any(|w| super::dot(&sub(&w[1], &w[0]), &sub(&w[2], &w[1])) <= 0.0);
    if folds || !(worst > MIN_RELATIVE_CHORD * mean) {
        return Err(Error::GraftFailure(format!(
            "blend is not immersed (min chord {worst:.3e}, mean {mean:.3e})"
        )));
    }
    let blended = DiscreteCurve::new(curve.dim(), nodes).map_err(|e| Error::GraftFailure(e.to_string()))?;
    resample_constant_speed(&blended)
}

#[cfg(test)]
mod tests {
    use super::super::cm_distances;
    use super::super::tests::circle;
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn cutoff_shape() {
        assert_eq!(cutoff(-1.0), 1.0);
        assert_eq!(cutoff(0.0), 1.0);
        assert_eq!(cutoff(1.0), 0.0);
        assert_eq!(cutoff(0.5), 0.5);
        let h = 1e-6;
        assert!(((cutoff(h) - 1.0) / h).abs() < 1e-6);
        assert!((cutoff(1.0 - h) / h).abs() < 1e-6);
    }

    fn own_boundary(c: &DiscreteCurve) -> BoundaryData {
        let (v0, v1) = c.end_tangents();
        BoundaryData::normalized(c.dim(), c.start(), c.end(), v0, v1).unwrap()
    }

    #[test]
    fn own_boundary_data_is_a_fixed_point() {
        let c = circle(1.0, 0.75 * PI, 512);
        let g = boundary_graft(&c, &own_boundary(&c), 0.1).unwrap();
        let d = cm_distances(&g, &c, 2).unwrap();
        assert!(d.iter().all(|&v| v <= 1e-10), "{d:?}");
    }

    #[test]
    fn small_shift_has_small_c2_effect() {
        let c = circle(1.0, 0.75 * PI, 1024);
        let mut b = own_boundary(&c);
        b.p0[0] += 1e-6;
        let g = boundary_graft(&c, &b, 1e-2).unwrap();
        assert!((g.start()[0] - b.p0[0]).abs() < 1e-15);
        let d = cm_distances(&g, &c, 2).unwrap();
        assert!(d[2] <= 0.1, "{d:?}");
    }

    #[test]
    fn c2_effect_grows_as_width_shrinks() {
        let c = circle(1.0, 0.75 * PI, 2048);
        let mut b = own_boundary(&c);
        b.p0[1] += 1e-3;
        let wide = cm_distances(&boundary_graft(&c, &b, 0.2).unwrap(), &c, 2).unwrap()[2];
        let narrow = cm_distances(&boundary_graft(&c, &b, 0.05).unwrap(), &c, 2).unwrap()[2];
        assert!(narrow > 8.0 * wide, "{wide} {narrow}");
    }

    #[test]
    fn tangent_is_matched() {
        let c = circle(1.0, 0.5 * PI, 1024);
        let b = own_boundary(&c);
        let (sa, ca) = 0.05f64.sin_cos();
        let v1 = [ca * b.v1[0] - sa * b.v1[1], sa * b.v1[0] + ca * b.v1[1], 0.0];
        let b = BoundaryData::normalized(2, b.p0, b.p1, b.v0, v1).unwrap();
        let g = boundary_graft(&c, &b, 0.1).unwrap();
        let (_, t1) = g.end_tangents();
        assert!(dist(&t1, &b.v1) < 1e-4, "{t1:?} {:?}", b.v1);
    }

    #[test]
    fn rejects_bad_width_and_collapse() {
        let c = circle(1.0, 1.0, 64);
        let b = own_boundary(&c);
        assert!(boundary_graft(&c, &b, 0.25).is_err());
        assert!(boundary_graft(&c, &b, 0.0).is_err());
        let mut bad = b;
        bad.v0 = [-bad.v0[0], -bad.v0[1], 0.0];
        assert!(matches!(boundary_graft(&c, &bad, 0.05), Err(Error::GraftFailure(_))));
    }
}
