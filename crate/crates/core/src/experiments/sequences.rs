use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Check, ConvergenceReport, REPORT_ORDER};
use crate::closedform::{analytic_bending_energy, reconstruct, ElasticaParams};
use crate::curve::{bending_energy, cm_distances, dot, DiscreteCurve, Point};
use crate::elliptic::{cn_squared_period_integral, complete_k};
use crate::{Error, Result};

/// Start of the interval on which the concentration curvature is checked
/// for uniform decay.
pub const CONCENTRATION_TAIL_START: f64 = 0.5;

/// Upper bound on the counterexample energies, checked from index
/// [`ENERGY_BOUND_FROM`] on.
pub const ENERGY_BOUND: f64 = 5.1;
pub const ENERGY_BOUND_FROM: usize = 4;

const ALIGNMENT_NOTE: &str = "segment reference: translated to gamma(0), aligned with gamma'(0)";

/// Oscillating wavelike member: `m = 1/j^2`, `A = 2K(m)`, `beta = 0`,
/// unit length.
pub fn oscillation_member(j: usize) -> Result<ElasticaParams> {
    if j < 2 {
        return Err(Error::InvalidArgument(format!("oscillation index j = {j} must be at least 2")));
    }
    let m = 1.0 / (j * j) as f64;
    ElasticaParams::wavelike(m, 2.0 * complete_k(m)?, 0.0)
}

/// `int_0^j sech^2(u + r) du`, written without cancellation.
fn sech_mass(j: f64, r: f64) -> f64 {
    j.sinh() / ((j + r).cosh() * r.cosh())
}

/// Concentrating borderline member `k = 2j sech(j s + r_j)` with `r_j >= 0`
/// chosen so that `int_0^j sech^2(u + r_j) du = tanh(1) / j`. Returns the
/// parameters and `r_j`.
pub fn concentration_member(j: usize) -> Result<(ElasticaParams, f64)> {
    if j < 1 {
        return Err(Error::InvalidArgument("concentration index must be at least 1".into()));
    }
    let jf = j as f64;
    let c = 1.0_f64.tanh();
    let target = c / jf;
    let (mut lo, mut hi) = (0.0, jf + (4.0 * jf / c).ln());
    let f = |r: f64| sech_mass(jf, r) - target;
    if f(lo).abs() <= 4.0 * f64::EPSILON {
        return Ok((ElasticaParams::borderline(2.0 * jf, 0.0)?, 0.0));
    }
    if f(lo) < 0.0 || f(hi) > 0.0 {
        return Err(Error::Bracket(format!("no root of the sech^2 mass in [{lo}, {hi}] for j = {j}")));
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    Ok((ElasticaParams::borderline(2.0 * jf, r)?, r))
}

/// Straight segment with the same start, initial tangent, length and
/// sampling as `curve`.
pub fn aligned_segment(curve: &DiscreteCurve, tangent: &Point) -> Result<DiscreteCurve> {
    let start = curve.start();
    let l = curve.length();
    let end = [start[0] + l * tangent[0], start[1] + l * tangent[1], start[2] + l * tangent[2]];
    DiscreteCurve::segment(curve.dim(), start, end, curve.segments())
}

fn signed_angle(a: &Point, b: &Point) -> f64 {
    (a[0] * b[1] - a[1] * b[0]).atan2(dot(a, b))
}

/// `int k ds` of a planar curve: the lifted angle from the start tangent to
/// the end tangent.
fn total_turning(curve: &DiscreteCurve) -> Option<f64> {
    if curve.dim() != 2 {
        return None;
    }
    let edges = curve.edge_tangents();
    let (t0, t1) = curve.end_tangents();
    let inner: f64 = curve.turning_angles().iter().sum();
    Some(signed_angle(&t0, &edges[0]) + inner + signed_angle(&edges[edges.len() - 1], &t1))
}

/// Report for a closed-form member of unit length compared with the
/// aligned segment.
fn member_report(j: usize, p: &ElasticaParams, energy: f64, segments: usize) -> Result<ConvergenceReport> {
    let curve = reconstruct(p, 1.0, segments)?;
    // Reconstruction starts at the origin with tangent e1.
    let segment = aligned_segment(&curve, &[1.0, 0.0, 0.0])?;
    let quadrature = analytic_bending_energy(p, 1.0);
    let mut notes = vec![ALIGNMENT_NOTE.to_string()];
    if (quadrature - energy).abs() > 1e-8 * energy {
        notes.push(format!("closed-form energy {energy} disagrees with quadrature {quadrature}"));
    }
    Ok(ConvergenceReport {
        index: j,
        parameter: j as f64,
        energy,
        discrete_energy: bending_energy(&curve)?,
        length: curve.length(),
        lambda: p.lambda,
        killing: Some(p.killing),
        cm_distances: cm_distances(&curve, &segment, REPORT_ORDER)?,
        total_turning: total_turning(&curve),
        converged: true,
        notes,
    })
}

fn check_sequence_args(j_max: usize, segments: usize) -> Result<()> {
    if j_max < 2 {
        return Err(Error::InvalidArgument(format!("j_max = {j_max} must be at least 2")));
    }
    if segments < crate::curve::MIN_SEGMENTS {
        return Err(Error::Resolution {
            needed: crate::curve::MIN_SEGMENTS,
            got: segments,
        });
    }
    Ok(())
}

/// Wavelike members `j = 2..=j_max` with `B_j = 2K(m_j) int_0^{2K} cn^2`.
pub fn oscillation_sequence(j_max: usize, segments: usize) -> Result<Vec<ConvergenceReport>> {
    check_sequence_args(j_max, segments)?;
    (2..=j_max)
        .into_par_iter()
        .map(|j| {
            let p = oscillation_member(j)?;
            let energy = 2.0 * complete_k(p.m)? * cn_squared_period_integral(p.m)?;
            member_report(j, &p, energy, segments)
        })
        .collect()
}

/// Borderline members `j = 1..=j_max` with `B_j = 4j int_0^j sech^2(u + r_j)`.
pub fn concentration_sequence(j_max: usize, segments: usize) -> Result<Vec<ConvergenceReport>> {
    check_sequence_args(j_max, segments)?;
    (1..=j_max)
        .into_par_iter()
        .map(|j| {
            let (p, r) = concentration_member(j)?;
            let energy = 4.0 * j as f64 * sech_mass(j as f64, r);
            let mut rep = member_report(j, &p, energy, segments)?;
            rep.notes.push(format!("r_j = {r}"));
            Ok(rep)
        })
        .collect()
}

/// Families examined by [`dichotomy_probe`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ProbeFamily {
    /// The same elastica for every `j`.
    Constant { params: ElasticaParams, length: f64 },
    Oscillation,
    Concentration,
}

impl ProbeFamily {
    pub fn name(&self) -> &'static str {
        match self {
            ProbeFamily::Constant { .. } => "constant",
            ProbeFamily::Oscillation => "oscillation",
            ProbeFamily::Concentration => "concentration",
        }
    }

    /// Member `j`, its length, and whether the limit is the aligned segment.
    fn member(&self, j: usize) -> Result<(ElasticaParams, f64, bool)> {
        match *self {
            ProbeFamily::Constant { params, length } => Ok((params, length, false)),
            ProbeFamily::Oscillation => Ok((oscillation_member(j)?, 1.0, true)),
            ProbeFamily::Concentration => Ok((concentration_member(j)?.0, 1.0, true)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitKind {
    SmoothConverging,
    SegmentLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyRow {
    pub family: String,
    pub j: usize,
    pub lambda: f64,
    pub c1: f64,
    pub c2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyVerdict {
    pub family: String,
    pub lambda_bounded: bool,
    /// Smallest `C^2` distance over the second half of the indices.
    pub c2_floor: f64,
    pub limit: LimitKind,
    /// Bounded multipliers exactly when the convergence is smooth.
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyTable {
    pub rows: Vec<DichotomyRow>,
    pub verdicts: Vec<DichotomyVerdict>,
}

/// `C^2` distances at or below this count as converged.
const SMOOTH_C2_TOL: f64 = 1e-6;
/// Multipliers whose late maximum exceeds the early maximum by more than
/// this factor count as unbounded.
const LAMBDA_GROWTH: f64 = 2.0;

/// Tabulates multipliers and `C^1`, `C^2` distances to the `C^1` limit for
/// `j = 2..=j_max` and classifies each family.
pub fn dichotomy_probe(families: &[ProbeFamily], j_max: usize, segments: usize) -> Result<DichotomyTable> {
    if j_max < 4 {
        return Err(Error::InvalidArgument(format!("dichotomy probe needs j_max >= 4, got {j_max}")));
    }
    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    for fam in families {
        let fam_rows: Vec<DichotomyRow> = (2..=j_max)
            .into_par_iter()
            .map(|j| {
                let (p, length, to_segment) = fam.member(j)?;
                let curve = reconstruct(&p, length, segments)?;
                let limit = if to_segment {
                    aligned_segment(&curve, &[1.0, 0.0, 0.0])?
                } else {
                    reconstruct(&p, length, segments)?
                };
                let d = cm_distances(&curve, &limit, 2)?;
                Ok(DichotomyRow {
                    family: fam.name().to_string(),
                    j,
                    lambda: p.lambda,
                    c1: d[0].max(d[1]),
                    c2: d[0].max(d[1]).max(d[2]),
                })
            })
            .collect::<Result<_>>()?;
        let half = fam_rows.len() / 2;
        let peak = |rs: &[DichotomyRow]| rs.iter().fold(0.0_f64, |m, r| m.max(r.lambda.abs()));
        let (early, late) = (peak(&fam_rows[..half]), peak(&fam_rows[half..]));
        let lambda_bounded = late <= LAMBDA_GROWTH * early + 1e-12;
        let c2_floor = fam_rows[half..].iter().fold(f64::INFINITY, |m, r| m.min(r.c2));
        let limit = if c2_floor <= SMOOTH_C2_TOL {
            LimitKind::SmoothConverging
        } else {
            LimitKind::SegmentLimit
        };
        verdicts.push(DichotomyVerdict {
            family: fam.name().to_string(),
            lambda_bounded,
            c2_floor,
            limit,
            consistent: lambda_bounded == (limit == LimitKind::SmoothConverging),
        });
        rows.extend(fam_rows);
    }
    Ok(DichotomyTable { rows, verdicts })
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// Built-in assertions for a counterexample sequence.
pub fn sequence_checks(family: ProbeFamily, reports: &[ConvergenceReport]) -> Vec<Check> {
    let energies: Vec<f64> = reports.iter().map(|r| r.energy).collect();
    let inf = energies.iter().copied().fold(f64::INFINITY, f64::min);
    // B_2 = 5.479 and B_3 = 5.155 for the oscillating family; the bound
    // 5.1 holds from j = 4 on.
    let sup = reports
        .iter()
        .filter(|r| r.index >= ENERGY_BOUND_FROM)
        .fold(0.0_f64, |m, r| m.max(r.energy));
    // Polygon length falls short of the arclength by O(h^2 B).
    let unit_length = reports.iter().all(|r| (r.length - 1.0).abs() <= 1e-4);
    let lambdas: Vec<f64> = reports.iter().map(|r| r.lambda.abs()).collect();
    let c1: Vec<f64> = reports.iter().map(|r| r.cm_distance(1)).collect();
    let mut checks = vec![
        Check::new("finite", reports.iter().all(|r| r.is_finite()), String::new()),
        Check::new(
            "bounded energy and unit length",
            sup <= ENERGY_BOUND && unit_length,
            format!("sup B over j >= {ENERGY_BOUND_FROM} = {sup}"),
        ),
        Check::new("multipliers grow", strictly_decreasing(&lambdas.iter().map(|v| -v).collect::<Vec<_>>()), String::new()),
        Check::new("C1 distance decreases", strictly_decreasing(&c1), format!("last = {:?}", c1.last())),
    ];
    match family {
        ProbeFamily::Oscillation => {
            checks.push(Check::new("energy bounded below", inf >= 4.9, format!("inf B = {inf}")));
            let down = energies.windows(2).all(|w| w[1] < w[0]);
            checks.push(Check::new("energy decreases towards pi^2/2", down, String::new()));
            checks.push(Check::new("multipliers negative", reports.iter().all(|r| r.lambda < 0.0), String::new()));
        }
        ProbeFamily::Concentration => {
            let c = 1.0_f64.tanh();
            let spread = energies.iter().fold(0.0_f64, |m, e| m.max((e - 4.0 * c).abs()));
            checks.push(Check::new("energy bounded below", inf >= 3.0, format!("inf B = {inf}")));
            checks.push(Check::new("energy constant", spread <= 1e-6, format!("max |B - 4 tanh 1| = {spread}")));
            let exact = reports.iter().all(|r| r.lambda == 2.0 * r.parameter * r.parameter);
            checks.push(Check::new("multiplier 2j^2", exact, String::new()));
        }
        ProbeFamily::Constant { .. } => {}
    }
    checks
}
