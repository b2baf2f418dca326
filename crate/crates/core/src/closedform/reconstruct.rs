use super::{ElasticaParams, FamilyKind, FAMILY_TOL};
use crate::curve::{resample_constant_speed, DiscreteCurve, Point, MIN_SEGMENTS};
use crate::{Error, Result};

fn check(length: f64, segments: usize) -> Result<()> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::InvalidArgument(format!("length {length} must be positive")));
    }
    if segments < MIN_SEGMENTS {
        return Err(Error::Resolution {
            needed: MIN_SEGMENTS,
            got: segments,
        });
    }
    Ok(())
}

/// Planar or spatial reconstruction depending on the family.
pub fn reconstruct(p: &ElasticaParams, length: f64, segments: usize) -> Result<DiscreteCurve> {
    if p.family == FamilyKind::Spatial {
        reconstruct_spatial(p, length, segments)
    } else {
        reconstruct_planar(p, length, segments)
    }
}

/// Integrates `theta' = k`, `gamma' = (cos theta, sin theta)` from the
/// origin with `theta(0) = 0` by RK4 with `segments` steps, then equalizes
/// the chords.
pub fn reconstruct_planar(p: &ElasticaParams, length: f64, segments: usize) -> Result<DiscreteCurve> {
    check(length, segments)?;
    if !p.family.is_planar() {
        return Err(Error::NotPlanar(p.c));
    }
    let h = length / segments as f64;
    let k = |s: f64| p.signed_curvature(s).expect("planar family");
    let mut nodes: Vec<Point> = Vec::with_capacity(segments + 1);
    let (mut theta, mut x, mut y) = (0.0f64, 0.0f64, 0.0f64);
    nodes.push([0.0; 3]);
    for i in 0..segments {
        let s = i as f64 * h;
        let (k1, k2, k4) = (k(s), k(s + 0.5 * h), k(s + h));
        // theta is driven by k(s) alone, so its RK4 stages are quadrature.
        let th1 = theta;
        let th2 = theta + 0.5 * h * k1;
        let th3 = theta + 0.5 * h * k2;
        let th4 = theta + h * k2;
        x += h / 6.0 * (th1.cos() + 2.0 * th2.cos() + 2.0 * th3.cos() + th4.cos());
        y += h / 6.0 * (th1.sin() + 2.0 * th2.sin() + 2.0 * th3.sin() + th4.sin());
        theta += h / 6.0 * (k1 + 4.0 * k2 + k4);
        nodes.push([x, y, 0.0]);
    }
    resample_constant_speed(&DiscreteCurve::new(2, nodes)?)
}

/// Frenet frame integration `T' = kN, N' = -kT + tB, B' = -tN` from the
/// origin with frame `(e1, e2, e3)`, then equalizes the chords. Planar
/// families are delegated to [`reconstruct_planar`].
pub fn reconstruct_spatial(p: &ElasticaParams, length: f64, segments: usize) -> Result<DiscreteCurve> {
    check(length, segments)?;
    if p.family.is_planar() {
        return reconstruct_planar(p, length, segments);
    }
    let h = length / segments as f64;
    let floor = FAMILY_TOL * p.amplitude * p.amplitude;
    let kt = |s: f64| -> Result<(f64, f64)> {
        let k2 = p.curvature_squared(s);
        if k2 <= floor {
            return Err(Error::SingularTorsion(s));
        }
        Ok((k2.sqrt(), p.c / k2))
    };
    type State = [f64; 12];
    let rhs = |s: f64, y: &State| -> Result<State> {
        let (k, t) = kt(s)?;
        let mut d = [0.0; 12];
        for c in 0..3 {
            let (tc, nc, bc) = (y[3 + c], y[6 + c], y[9 + c]);
            d[c] = tc;
            d[3 + c] = k * nc;
            d[6 + c] = -k * tc + t * bc;
            d[9 + c] = -t * nc;
        }
        Ok(d)
    };
    let axpy = |y: &State, a: f64, d: &State| -> State {
        let mut out = *y;
        for (o, v) in out.iter_mut().zip(d) {
            *o += a * v;
        }
        out
    };
    let mut y: State = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
    let mut nodes: Vec<Point> = Vec::with_capacity(segments + 1);
    nodes.push([0.0; 3]);
    for i in 0..segments {
        let s = i as f64 * h;
        let d1 = rhs(s, &y)?;
        let d2 = rhs(s + 0.5 * h, &axpy(&y, 0.5 * h, &d1))?;
        let d3 = rhs(s + 0.5 * h, &axpy(&y, 0.5 * h, &d2))?;
        let d4 = rhs(s + h, &axpy(&y, h, &d3))?;
        for j in 0..12 {
            y[j] += h / 6.0 * (d1[j] + 2.0 * d2[j] + 2.0 * d3[j] + d4[j]);
        }
        nodes.push([y[0], y[1], y[2]]);
    }
    resample_constant_speed(&DiscreteCurve::new(3, nodes)?)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, 8 points.
const GL8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
];

/// `int_0^L k(s)^2 ds` by composite Gauss-Legendre quadrature.
pub fn analytic_bending_energy(p: &ElasticaParams, length: f64) -> f64 {
    // Panels fine enough to resolve the oscillation scale 1 / A.
    let panels = ((length * p.amplitude * 4.0).ceil() as usize).clamp(64, 1 << 20);
    let h = length / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let mid = (i as f64 + 0.5) * h;
        total += GL8
            .iter()
            .map(|&(x, wt)| wt * p.curvature_squared(mid + 0.5 * h * x))
            .sum::<f64>();
    }
    0.5 * h * total
}
