use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ConvergenceReport, REPORT_ORDER};
use crate::curve::{add, cm_distances, cross, dot, norm, scale, sub, unit, BoundaryData, DiscreteCurve, FixedLengthClass, Point};
use crate::solver::{minimize_with, Constraint, MinimizeResult, SolverConfig};
use crate::{Error, Result};

/// Direction of a perturbation of `(Gamma, L)` or `(Gamma, lambda)`.
///
/// Tangent components are projected onto the tangent space of the sphere
/// at the corresponding `V_i` and applied along great circles, so perturbed
/// tangents stay unit vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub dp0: Point,
    pub dp1: Point,
    pub dv0: Point,
    pub dv1: Point,
    /// Change of `L` or `lambda`.
    pub dparam: f64,
}

/// Orthonormal basis of the complement of the unit vector `v` in `R^dim`.
fn tangent_basis(v: &Point, dim: usize) -> Vec<Point> {
    if dim == 2 {
        return vec![[-v[1], v[0], 0.0]];
    }
    let helper = if v[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let a = unit(&cross(v, &helper));
    vec![a, cross(v, &a)]
}

fn project_out(d: &Point, v: &Point) -> Point {
    sub(d, &scale(v, dot(d, v)))
}

/// `v` moved along the great circle towards `d` by angle `|d|`.
fn rotate_towards(v: &Point, d: &Point) -> Point {
    let a = norm(d);
    if a == 0.0 {
        return *v;
    }
    add(&scale(v, a.cos()), &scale(d, a.sin() / a))
}

impl Perturbation {
    /// Gaussian direction in positions, tangent spaces and the parameter,
    /// normalized to unit length. Deterministic in `seed`.
    pub fn random(gamma: &BoundaryData, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = || -> f64 { StandardNormal.sample(&mut rng) };
        let dim = gamma.dim;
        let point = |g: &mut dyn FnMut() -> f64| {
            let mut p = [0.0; 3];
            for c in p.iter_mut().take(dim) {
                *c = g();
            }
            p
        };
        let dp0 = point(&mut g);
        let dp1 = point(&mut g);
        let tangent = |v: &Point, g: &mut dyn FnMut() -> f64| {
            tangent_basis(v, dim).iter().fold([0.0; 3], |acc, b| add(&acc, &scale(b, g())))
        };
        let dv0 = tangent(&gamma.v0, &mut g);
        let dv1 = tangent(&gamma.v1, &mut g);
        let dparam = g();
        Self {
            dp0,
            dp1,
            dv0,
            dv1,
            dparam,
        }
        .normalized()
    }

    pub fn norm(&self) -> f64 {
        (dot(&self.dp0, &self.dp0)
            + dot(&self.dp1, &self.dp1)
            + dot(&self.dv0, &self.dv0)
            + dot(&self.dv1, &self.dv1)
            + self.dparam * self.dparam)
            .sqrt()
    }

    pub fn normalized(&self) -> Self {
        let s = 1.0 / self.norm();
        Self {
            dp0: scale(&self.dp0, s),
            dp1: scale(&self.dp1, s),
            dv0: scale(&self.dv0, s),
            dv1: scale(&self.dv1, s),
            dparam: self.dparam * s,
        }
    }

    /// Perturbed problem at magnitude `delta`.
    pub fn apply(&self, gamma: &BoundaryData, constraint: Constraint, delta: f64) -> Result<(BoundaryData, Constraint)> {
        let dv0 = scale(&project_out(&self.dv0, &gamma.v0), delta);
        let dv1 = scale(&project_out(&self.dv1, &gamma.v1), delta);
        let g = BoundaryData::normalized(
            gamma.dim,
            add(&gamma.p0, &scale(&self.dp0, delta)),
            add(&gamma.p1, &scale(&self.dp1, delta)),
            rotate_towards(&gamma.v0, &dv0),
            rotate_towards(&gamma.v1, &dv1),
        )?;
        let c = match constraint {
            Constraint::FixedLength(l) => {
                let l = l + delta * self.dparam;
                if g.fixed_length_class(l) == FixedLengthClass::Infeasible {
                    return Err(Error::Infeasible {
                        chord: g.chord(),
                        length: l,
                    });
                }
                Constraint::FixedLength(l)
            }
            Constraint::Penalized(lambda) => {
                let lambda = lambda + delta * self.dparam;
                if !(lambda > 0.0) {
                    return Err(Error::InvalidArgument(format!("perturbed penalty {lambda} is not positive")));
                }
                Constraint::Penalized(lambda)
            }
        };
        Ok((g, c))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub reference: ConvergenceReport,
    pub reference_curve: DiscreteCurve,
    /// One row per solved perturbation, in schedule order.
    pub rows: Vec<ConvergenceReport>,
    /// Perturbation sizes that left the admissible set, with the reason.
    pub skipped: Vec<(f64, String)>,
    /// `C^2` distances never increase along the schedule.
    pub c2_monotone: bool,
    pub final_c2: f64,
    /// The last `C^2` distance is at least half the largest one: the
    /// minimizers do not approach the reference.
    pub discontinuity: bool,
}

/// Slack for solver reproducibility in the monotonicity test.
const MONOTONE_SLACK: f64 = 1e-9;

fn row(index: usize, delta: f64, r: &MinimizeResult, reference: &MinimizeResult) -> Result<ConvergenceReport> {
    Ok(ConvergenceReport {
        index,
        parameter: delta,
        energy: r.energy,
        discrete_energy: r.energy,
        length: r.length,
        lambda: r.lambda_est,
        killing: None,
        cm_distances: cm_distances(&r.curve, &reference.curve, REPORT_ORDER)?,
        total_turning: r.turning,
        converged: r.converged,
        notes: Vec::new(),
    })
}

/// [`stability_sweep_along`] a random direction drawn from `cfg.seed`.
pub fn stability_sweep(
    gamma: &BoundaryData,
    constraint: Constraint,
    schedule: &[f64],
    cfg: &SolverConfig,
) -> Result<StabilityReport> {
    stability_sweep_along(gamma, constraint, schedule, &Perturbation::random(gamma, cfg.seed), cfg)
}

/// Solves the reference problem, then each problem perturbed by
/// `delta_k * direction`, recording `C^0..C^3` distances to the reference
/// minimizer.
pub fn stability_sweep_along(
    gamma: &BoundaryData,
    constraint: Constraint,
    schedule: &[f64],
    direction: &Perturbation,
    cfg: &SolverConfig,
) -> Result<StabilityReport> {
    if schedule.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
        return Err(Error::InvalidArgument("perturbation sizes must be finite and non-negative".into()));
    }
    let reference = minimize_with(gamma, constraint, cfg)?;
    let reference_row = row(0, 0.0, &reference, &reference)?;
    let solved: Vec<(f64, Result<ConvergenceReport>)> = schedule
        .par_iter()
        .enumerate()
        .map(|(k, &delta)| {
            let out = direction
                .apply(gamma, constraint, delta)
                .and_then(|(g, c)| minimize_with(&g, c, cfg))
                .and_then(|r| row(k + 1, delta, &r, &reference));
            (delta, out)
        })
        .collect();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (delta, out) in solved {
        match out {
            Ok(r) => rows.push(r),
            Err(e @ (Error::Infeasible { .. } | Error::InvalidArgument(_))) => skipped.push((delta, e.to_string())),
            Err(e) => return Err(e),
        }
    }
    let c2: Vec<f64> = rows.iter().map(|r| r.cm_distance(2)).collect();
    let c2_monotone = c2.windows(2).all(|w| w[1] <= w[0] + MONOTONE_SLACK);
    let final_c2 = c2.last().copied().unwrap_or(0.0);
    let peak = c2.iter().copied().fold(0.0, f64::max);
    Ok(StabilityReport {
        reference: reference_row,
        reference_curve: reference.curve,
        rows,
        skipped,
        c2_monotone,
        final_c2,
        discontinuity: peak > 0.0 && final_c2 >= 0.5 * peak,
    })
}
