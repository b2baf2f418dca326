//! Clamped minimization of the bending energy, at fixed length or with a
//! length penalty `E = B + lambda L`.
//!
//! Each start is solved by an equality-constrained SQP method (Newton steps
//! on the KKT system, see [`sqp`]). Planar problems default to the
//! tangent-angle representation, which is constant-speed by construction;
//! the node representation handles `R^3`.
//!
//! For planar data the total turning `theta_end - theta_start + 2 pi k` is a
//! discrete invariant of a start, so every start is tied to a lift `k`. Lifts
//! are visited in order of the Cauchy-Schwarz lower bound on their energy and
//! skipped once the bound exceeds the best energy found.

mod angle;
mod init;
mod points;
mod sqp;

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{
    bending_energy, cm_distance, dist, el_residual, estimate_multiplier, BoundaryData, DiscreteCurve, FixedLengthClass,
    PenalizedClass, Point,
};
use crate::{Error, Result};

pub use sqp::TelemetryRecord;

use angle::AngleProblem;
use points::{complement_basis, PointsProblem};
use sqp::SqpOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    /// Edge angles, planar only.
    TangentAngle,
    /// Node positions, planar or spatial.
    Points,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Constraint {
    FixedLength(f64),
    Penalized(f64),
}

/// Solver settings.
///
/// `outer_iters` bounds the SQP iterations of one start and `inner_iters`
/// the backtracking steps of one line search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub segments: usize,
    pub representation: Representation,
    pub outer_iters: usize,
    pub inner_iters: usize,
    pub constraint_tol: f64,
    pub grad_tol: f64,
    pub penalty_growth: f64,
    pub multistart_count: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            segments: 256,
            representation: Representation::TangentAngle,
            outer_iters: 200,
            inner_iters: 40,
            constraint_tol: 1e-8,
            grad_tol: 1e-4,
            penalty_growth: 10.0,
            multistart_count: 6,
            seed: 0,
        }
    }
}

pub const MIN_SOLVER_SEGMENTS: usize = 64;

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.segments < MIN_SOLVER_SEGMENTS {
            return Err(Error::Resolution {
                needed: MIN_SOLVER_SEGMENTS,
                got: self.segments,
            });
        }
        for (name, v) in [("constraint_tol", self.constraint_tol), ("grad_tol", self.grad_tol)] {
            if !(v > 0.0 && v <= 1e-2) {
                return bad(format!("{name} = {v} must lie in (0, 1e-2]"));
            }
        }
        if !(self.penalty_growth > 1.0 && self.penalty_growth.is_finite()) {
            return bad(format!("penalty_growth = {} must exceed 1", self.penalty_growth));
        }
        if self.multistart_count == 0 || self.outer_iters == 0 || self.inner_iters == 0 {
            return bad("iteration and start counts must be positive".into());
        }
        Ok(())
    }

    fn sqp_options(&self) -> SqpOptions {
        SqpOptions {
            max_iters: self.outer_iters,
            max_backtracks: self.inner_iters,
            penalty_growth: self.penalty_growth,
            step_tol: 1e-9,
            feas_tol: 0.1 * self.constraint_tol,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimizeResult {
    #[serde(skip)]
    pub curve: DiscreteCurve,
    /// `B`, plus `lambda L` for the penalized problem.
    pub energy: f64,
    pub length: f64,
    /// Estimated multiplier (fixed length) or the given penalty.
    pub lambda_est: f64,
    pub el_residual_norm: f64,
    pub constraint_violation: f64,
    pub converged: bool,
    pub starts_used: usize,
    /// Index of the start that produced this curve.
    pub start: usize,
    /// Total turning for planar results.
    pub turning: Option<f64>,
    #[serde(skip)]
    pub telemetry: Vec<TelemetryRecord>,
}

/// Boundary errors of a curve against clamped data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryErrors {
    /// `max(|gamma(0) - P0|, |gamma(1) - P1|) / max(1, L)`.
    pub position: f64,
    pub tangent: f64,
    /// `|L[gamma] - L| / L`, zero when the length is free.
    pub length: f64,
}

impl BoundaryErrors {
    pub fn max(&self) -> f64 {
        self.position.max(self.tangent).max(self.length)
    }
}

pub fn boundary_errors(curve: &DiscreteCurve, gamma: &BoundaryData, length: Option<f64>) -> BoundaryErrors {
    let l = curve.length();
    let (t0, t1) = curve.end_tangents();
    BoundaryErrors {
        position: dist(&curve.start(), &gamma.p0).max(dist(&curve.end(), &gamma.p1)) / l.max(1.0),
        tangent: dist(&t0, &gamma.v0).max(dist(&t1, &gamma.v1)),
        length: length.map_or(0.0, |target| (l - target).abs() / target),
    }
}

/// Multiplier and residual norm of the elastica equation for `curve`.
///
/// For fixed length the multiplier is estimated by least squares; segments
/// get multiplier `0` and residual `0`. For the penalized problem `lambda`
/// is the penalty.
fn criticality(curve: &DiscreteCurve, constraint: Constraint) -> Result<(f64, f64)> {
    match constraint {
        Constraint::FixedLength(_) => match estimate_multiplier(curve) {
            Ok(est) => Ok((est.lambda, est.residual)),
            Err(Error::Degenerate(_)) => Ok((0.0, el_residual(curve, 0.0)?.norm)),
            Err(e) => Err(e),
        },
        Constraint::Penalized(lambda) => Ok((lambda, el_residual(curve, lambda)?.norm)),
    }
}

fn energy_of(curve: &DiscreteCurve, constraint: Constraint) -> Result<f64> {
    let b = bending_energy(curve)?;
    Ok(match constraint {
        Constraint::FixedLength(_) => b,
        Constraint::Penalized(lambda) => b + lambda * curve.length(),
    })
}

/// Assembles a result from a finished curve.
fn finish(
    curve: DiscreteCurve,
    gamma: &BoundaryData,
    constraint: Constraint,
    cfg: &SolverConfig,
    solver_converged: bool,
    start: usize,
    turning: Option<f64>,
    telemetry: Vec<TelemetryRecord>,
) -> Result<MinimizeResult> {
    let fixed = match constraint {
        Constraint::FixedLength(l) => Some(l),
        Constraint::Penalized(_) => None,
    };
    let violation = boundary_errors(&curve, gamma, fixed).max();
    let (lambda_est, residual) = criticality(&curve, constraint)?;
    let energy = energy_of(&curve, constraint)?;
    Ok(MinimizeResult {
        length: curve.length(),
        curve,
        energy,
        lambda_est,
        el_residual_norm: residual,
        constraint_violation: violation,
        converged: solver_converged && violation <= cfg.constraint_tol && residual <= 10.0 * cfg.grad_tol,
        starts_used: 1,
        start,
        turning,
        telemetry,
    })
}

fn segment_result(gamma: &BoundaryData, constraint: Constraint, cfg: &SolverConfig) -> Result<MinimizeResult> {
    let curve = DiscreteCurve::segment(gamma.dim, gamma.p0, gamma.p1, cfg.segments)?;
    let turning = (gamma.dim == 2).then_some(0.0);
    finish(curve, gamma, constraint, cfg, true, 0, turning, Vec::new())
}

fn angle_of(v: &Point) -> f64 {
    v[1].atan2(v[0])
}

/// Lifts of the end angle with their energy lower bounds, best first.
fn lifts(gamma: &BoundaryData, constraint: Constraint) -> Vec<(f64, f64)> {
    let (ts, te) = (angle_of(&gamma.v0), angle_of(&gamma.v1));
    let k0 = ((ts - te) / (2.0 * PI)).round() as i64;
    let mut out: Vec<(f64, f64)> = (k0 - 2..=k0 + 2)
        .map(|k| {
            let end = te + 2.0 * PI * k as f64;
            let turn = end - ts;
            let bound = match constraint {
                Constraint::FixedLength(l) => turn * turn / l,
                Constraint::Penalized(lambda) => 2.0 * lambda.sqrt() * turn.abs(),
            };
            (end, bound)
        })
        .collect();
    out.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)));
    out
}

/// One SQP start in the angle representation.
fn solve_angle_start(
    gamma: &BoundaryData,
    constraint: Constraint,
    cfg: &SolverConfig,
    theta_end: f64,
    start: usize,
) -> Result<MinimizeResult> {
    let n = cfg.segments;
    let d = gamma.chord_vector();
    let chord = gamma.chord();
    let theta_start = angle_of(&gamma.v0);
    let (fixed_length, lambda) = match constraint {
        Constraint::FixedLength(l) => (Some(l), 0.0),
        Constraint::Penalized(lambda) => (None, lambda),
    };
    let problem = AngleProblem {
        n,
        dx: d[0],
        dy: d[1],
        theta_start,
        theta_end,
        fixed_length,
        lambda,
    };
    let coef = init::coefficients(start, init::amplitude(chord, fixed_length), cfg.seed);
    let mut x0 = init::angles(n, theta_start, theta_end, &coef);
    if fixed_length.is_none() {
        x0.push(init::penalized_length(chord, lambda, theta_end - theta_start, start));
    }
    let out = sqp::solve(&problem, x0, &cfg.sqp_options(), start);
    let l = problem.length(&out.x);
    let h = l / n as f64;
    let mut nodes = Vec::with_capacity(n + 1);
    let mut p = gamma.p0;
    nodes.push(p);
    for t in &out.x[..n] {
        p = [p[0] + h * t.cos(), p[1] + h * t.sin(), 0.0];
        nodes.push(p);
    }
    let curve = DiscreteCurve::new(2, nodes)?;
    finish(
        curve,
        gamma,
        constraint,
        cfg,
        out.converged,
        start,
        Some(theta_end - theta_start),
        out.telemetry,
    )
}

/// One SQP start in the node representation.
fn solve_points_start(gamma: &BoundaryData, constraint: Constraint, cfg: &SolverConfig, start: usize) -> Result<MinimizeResult> {
    let n = cfg.segments;
    let chord = gamma.chord();
    let (fixed_length, lambda, target) = match constraint {
        Constraint::FixedLength(l) => (Some(l), 0.0, l),
        Constraint::Penalized(lambda) => {
            let turn = dist(&gamma.v0, &gamma.v1).max(1.0);
            (None, lambda, init::penalized_length(chord, lambda, 2.0 * turn, start))
        }
    };
    let guess = init::hermite_nodes(gamma, target, n, start, init::amplitude(chord, fixed_length), cfg.seed)?;
    let problem = PointsProblem {
        dim: gamma.dim,
        n,
        p0: gamma.p0,
        p1: gamma.p1,
        perp0: complement_basis(&gamma.v0, gamma.dim),
        perp1: complement_basis(&gamma.v1, gamma.dim),
        fixed_length,
        lambda,
    };
    let mut x0: Vec<f64> = guess.nodes()[1..n].iter().flat_map(|p| p[..gamma.dim].to_vec()).collect();
    if fixed_length.is_none() {
        x0.push(guess.length());
    }
    let out = sqp::solve(&problem, x0, &cfg.sqp_options(), start);
    let curve = DiscreteCurve::new(gamma.dim, problem.nodes(&out.x))?;
    // The tangent constraints also admit reversed tangents; reject those.
    let (t0, t1) = curve.end_tangents();
    let flipped = crate::curve::dot(&t0, &gamma.v0) < 0.0 || crate::curve::dot(&t1, &gamma.v1) < 0.0;
    // Equal chords only hold to the constraint tolerance; equalize exactly.
    let curve = crate::curve::resample_constant_speed(&curve)?;
    finish(curve, gamma, constraint, cfg, out.converged && !flipped, start, None, out.telemetry)
}

/// Runs `f` on a pool capped by `ELASTICA_THREADS` (unset or 0: automatic).
pub fn with_thread_cap<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    let cap = std::env::var("ELASTICA_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    if cap == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(cap).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Converged results, then feasible ones, then the rest.
fn tier(r: &MinimizeResult, cfg: &SolverConfig) -> u8 {
    if r.converged {
        0
    } else if r.constraint_violation <= cfg.constraint_tol {
        1
    } else {
        2
    }
}

fn rank(a: &MinimizeResult, b: &MinimizeResult, cfg: &SolverConfig) -> std::cmp::Ordering {
    tier(a, cfg)
        .cmp(&tier(b, cfg))
        .then(a.energy.total_cmp(&b.energy))
        .then(a.start.cmp(&b.start))
}

/// All multistart results, in `(energy, start)` order. With `prune`, lifts
/// whose lower bound exceeds the best feasible energy are skipped.
fn run_starts(gamma: &BoundaryData, constraint: Constraint, cfg: &SolverConfig, prune: bool) -> Result<Vec<MinimizeResult>> {
    let count = cfg.multistart_count;
    let mut all: Vec<MinimizeResult> = Vec::new();
    match cfg.representation {
        Representation::TangentAngle => {
            for (lift_index, (theta_end, bound)) in lifts(gamma, constraint).into_iter().enumerate() {
                let best = all
                    .iter()
                    .filter(|r| tier(r, cfg) < 2)
                    .map(|r| r.energy)
                    .fold(f64::INFINITY, f64::min);
                if prune && bound > best * (1.0 + 1e-3) {
                    continue;
                }
                let batch: Vec<Result<MinimizeResult>> = with_thread_cap(|| {
                    (0..count)
                        .into_par_iter()
                        .map(|i| solve_angle_start(gamma, constraint, cfg, theta_end, lift_index * count + i))
                        .collect()
                });
                for r in batch {
                    all.push(r?);
                }
            }
        }
        Representation::Points => {
            let batch: Vec<Result<MinimizeResult>> = with_thread_cap(|| {
                (0..count)
                    .into_par_iter()
                    .map(|i| solve_points_start(gamma, constraint, cfg, i))
                    .collect()
            });
            for r in batch {
                all.push(r?);
            }
        }
    }
    all.sort_by(|a, b| rank(a, b, cfg));
    Ok(all)
}

fn check_problem(gamma: &BoundaryData, constraint: Constraint, cfg: &SolverConfig) -> Result<Option<MinimizeResult>> {
    cfg.validate()?;
    if cfg.representation == Representation::TangentAngle && gamma.dim != 2 {
        return Err(Error::InvalidArgument(
            "the tangent-angle representation is planar; use Points in R^3".into(),
        ));
    }
    match constraint {
        Constraint::FixedLength(l) => match gamma.fixed_length_class(l) {
            FixedLengthClass::Infeasible => Err(Error::Infeasible {
                chord: gamma.chord(),
                length: l,
            }),
            FixedLengthClass::As => Ok(Some(segment_result(gamma, constraint, cfg)?)),
            FixedLengthClass::Aprime => Ok(None),
        },
        Constraint::Penalized(lambda) => {
            if !(lambda > 0.0 && lambda.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "lambda = {lambda}: the length penalty must be positive (for lambda <= 0 minimizers need not exist)"
                )));
            }
            match gamma.penalized_class() {
                PenalizedClass::Xs => Ok(Some(segment_result(gamma, constraint, cfg)?)),
                PenalizedClass::Xprime => Ok(None),
            }
        }
    }
}

fn minimize(gamma: &BoundaryData, constraint: Constraint, cfg: &SolverConfig) -> Result<MinimizeResult> {
    if let Some(r) = check_problem(gamma, constraint, cfg)? {
        return Ok(r);
    }
    let all = run_starts(gamma, constraint, cfg, true)?;
    let used = all.len();
    let telemetry: Vec<TelemetryRecord> = {
        let mut t: Vec<TelemetryRecord> = all.iter().flat_map(|r| r.telemetry.iter().copied()).collect();
        t.sort_by_key(|r| (r.start, r.iteration));
        t
    };
    let mut best = all.into_iter().next().expect("at least one start");
    best.starts_used = used;
    best.telemetry = telemetry;
    Ok(best)
}

/// Minimizes `B` over curves of length `length` with the clamped data.
pub fn minimize_fixed_length(gamma: &BoundaryData, length: f64, cfg: &SolverConfig) -> Result<MinimizeResult> {
    minimize(gamma, Constraint::FixedLength(length), cfg)
}

/// Minimizes `B + lambda L` over clamped curves of any length.
pub fn minimize_penalized(gamma: &BoundaryData, lambda: f64, cfg: &SolverConfig) -> Result<MinimizeResult> {
    minimize(gamma, Constraint::Penalized(lambda), cfg)
}

pub fn minimize_with(gamma: &BoundaryData, constraint: Constraint, cfg: &SolverConfig) -> Result<MinimizeResult> {
    minimize(gamma, constraint, cfg)
}

/// `C^1` distance below which two converged results count as one minimizer.
pub const CLUSTER_TOL: f64 = 1e-3;
/// Relative energy gap below which distinct clusters count as tied.
pub const TIE_TOL: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct LocalMinima {
    /// One representative per cluster, by increasing energy.
    pub clusters: Vec<MinimizeResult>,
    /// Number of converged starts in each cluster.
    pub sizes: Vec<usize>,
    /// Pairs of cluster indices whose energies agree to [`TIE_TOL`].
    pub near_ties: Vec<(usize, usize)>,
    pub starts_run: usize,
}

impl LocalMinima {
    /// More than one cluster attains the lowest energy.
    pub fn minimizer_ambiguous(&self) -> bool {
        self.near_ties.iter().any(|&(a, _)| a == 0)
    }
}

/// Runs every start (no lift pruning) and clusters the converged results.
pub fn enumerate_local_minima(gamma: &BoundaryData, constraint: Constraint, cfg: &SolverConfig) -> Result<LocalMinima> {
    if let Some(r) = check_problem(gamma, constraint, cfg)? {
        return Ok(LocalMinima {
            clusters: vec![r],
            sizes: vec![1],
            near_ties: Vec::new(),
            starts_run: 0,
        });
    }
    let all = run_starts(gamma, constraint, cfg, false)?;
    let starts_run = all.len();
    let mut clusters: Vec<MinimizeResult> = Vec::new();
    let mut sizes: Vec<usize> = Vec::new();
    for r in all.into_iter().filter(|r| r.converged) {
        let mut home = None;
        for (c, rep) in clusters.iter().enumerate() {
            if cm_distance(&r.curve, &rep.curve, 1)? <= CLUSTER_TOL {
                home = Some(c);
                break;
            }
        }
        match home {
            Some(c) => sizes[c] += 1,
            None => {
                clusters.push(r);
                sizes.push(1);
            }
        }
    }
    let mut near_ties = Vec::new();
    for a in 0..clusters.len() {
        for b in a + 1..clusters.len() {
            if (clusters[a].energy - clusters[b].energy).abs() <= TIE_TOL * clusters[a].energy.abs().max(f64::MIN_POSITIVE) {
                near_ties.push((a, b));
            }
        }
    }
    Ok(LocalMinima {
        clusters,
        sizes,
        near_ties,
        starts_run,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalityReport {
    pub lambda: f64,
    pub residual_norm: f64,
    pub boundary: BoundaryErrors,
    /// `(criterion, passed)`.
    pub checks: Vec<(String, bool)>,
}

impl CriticalityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }
}

/// Checks that `curve` is a clamped elastica for the given problem.
pub fn verify_critical(
    curve: &DiscreteCurve,
    gamma: &BoundaryData,
    constraint: Constraint,
    cfg: &SolverConfig,
) -> Result<CriticalityReport> {
    let fixed = match constraint {
        Constraint::FixedLength(l) => Some(l),
        Constraint::Penalized(_) => None,
    };
    let boundary = boundary_errors(curve, gamma, fixed);
    let (lambda, residual_norm) = criticality(curve, constraint)?;
    let checks = vec![
        ("constant speed".to_string(), curve.is_constant_speed()),
        ("endpoint positions".to_string(), boundary.position <= cfg.constraint_tol),
        ("endpoint tangents".to_string(), boundary.tangent <= cfg.constraint_tol),
        ("length".to_string(), boundary.length <= cfg.constraint_tol),
        ("elastica residual".to_string(), residual_norm <= 10.0 * cfg.grad_tol),
    ];
    Ok(CriticalityReport {
        lambda,
        residual_norm,
        boundary,
        checks,
    })
}

/// Writes telemetry as one JSON object per line.
pub fn write_telemetry(records: &[TelemetryRecord], path: &Path) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut file, r)?;
        file.write_all(b"\n")?;
    }
    file.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brief(r: &MinimizeResult) -> String {
        let last = r.telemetry.iter().filter(|t| t.start == r.start).last();
        format!(
            "E={} L={} viol={} res={} conv={} start={} last={last:?}",
            r.energy, r.length, r.constraint_violation, r.el_residual_norm, r.converged, r.start
        )
    }

    fn quick() -> SolverConfig {
        SolverConfig {
            segments: 128,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = [
            SolverConfig { segments: 32, ..quick() },
            SolverConfig { grad_tol: 0.1, ..quick() },
            SolverConfig { constraint_tol: 0.0, ..quick() },
            SolverConfig { penalty_growth: 1.0, ..quick() },
            SolverConfig { multistart_count: 0, ..quick() },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn collinear_data_gives_the_segment() {
        let g = BoundaryData::planar([0.0, 0.0], [2.0, 0.0], [1.0, 0.0], [1.0, 0.0]).unwrap();
        let r = minimize_fixed_length(&g, 2.0, &quick()).unwrap();
        assert_eq!(r.energy, 0.0);
        assert!(r.converged);
        let p = minimize_penalized(&g, 3.0, &quick()).unwrap();
        assert!((p.energy - 6.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_problems() {
        let g = BoundaryData::planar([0.0, 0.0], [2.0, 0.0], [1.0, 0.0], [0.0, 1.0]).unwrap();
        assert!(matches!(minimize_fixed_length(&g, 1.0, &quick()), Err(Error::Infeasible { .. })));
        assert!(matches!(minimize_penalized(&g, -1.0, &quick()), Err(Error::InvalidArgument(_))));
        assert!(matches!(minimize_penalized(&g, 0.0, &quick()), Err(Error::InvalidArgument(_))));
        let g3 = BoundaryData::new(3, [0.0; 3], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 1.0]).unwrap();
        assert!(minimize_fixed_length(&g3, 2.0, &quick()).is_err());
    }

    #[test]
    fn closed_data_penalized_is_the_circle() {
        let g = BoundaryData::planar([0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [1.0, 0.0]).unwrap();
        let r = minimize_penalized(&g, 1.0, &SolverConfig::default()).unwrap();
        assert!(r.converged, "{}", brief(&r));
        assert!((r.energy - 4.0 * PI).abs() < 5e-3 * 4.0 * PI, "{}", r.energy);
        assert!((r.length - 2.0 * PI).abs() < 1e-6);
    }

    #[test]
    fn symmetric_fixed_length_minimizers_mirror() {
        let g = BoundaryData::planar([0.0, 0.0], [3.0, 0.0], [1.0, 0.0], [1.0, 0.0]).unwrap();
        let cfg = SolverConfig {
            segments: 512,
            ..SolverConfig::default()
        };
        let r = minimize_fixed_length(&g, 3.6, &cfg).unwrap();
        assert!(r.converged, "{}", brief(&r));
        let mirrored: Vec<[f64; 3]> = r.curve.nodes().iter().map(|p| [p[0], -p[1], 0.0]).collect();
        let m = DiscreteCurve::new(2, mirrored).unwrap();
        assert!((bending_energy(&m).unwrap() - r.energy).abs() < 1e-6);
        let all = enumerate_local_minima(&g, Constraint::FixedLength(3.6), &cfg).unwrap();
        assert!(all.clusters.len() >= 2);
        assert!(all.minimizer_ambiguous());
        let (a, b) = (&all.clusters[0], &all.clusters[1]);
        assert!((a.energy - b.energy).abs() <= 1e-6 * a.energy);
        // The two lowest clusters are mirror images.
        let flipped: Vec<[f64; 3]> = b.curve.nodes().iter().map(|p| [p[0], -p[1], 0.0]).collect();
        let flipped = DiscreteCurve::new(2, flipped).unwrap();
        assert!(cm_distance(&a.curve, &flipped, 1).unwrap() < 1e-6);
    }

    #[test]
    fn telemetry_is_written_as_json_lines() {
        let g = BoundaryData::planar([0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, -1.0]).unwrap();
        let r = minimize_fixed_length(&g, 2.0, &quick()).unwrap();
        assert!(!r.telemetry.is_empty());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.jsonl");
        write_telemetry(&r.telemetry, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), r.telemetry.len());
        let first: TelemetryRecord = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(first, r.telemetry[0]);
    }

    #[test]
    fn rigid_motions_commute_with_the_solver() {
        let g = BoundaryData::planar([0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, -1.0]).unwrap();
        let (c, s) = (0.6_f64, 0.8_f64);
        let rot = |v: [f64; 2]| [c * v[0] - s * v[1], s * v[0] + c * v[1]];
        let shift = [2.0, -1.0];
        let p1 = rot([1.0, 0.0]);
        let h = BoundaryData::planar(shift, [p1[0] + shift[0], p1[1] + shift[1]], rot([0.0, 1.0]), rot([0.0, -1.0]))
            .unwrap();
        let a = minimize_fixed_length(&g, 2.0, &quick()).unwrap();
        let b = minimize_fixed_length(&h, 2.0, &quick()).unwrap();
        assert!((a.energy - b.energy).abs() < 1e-8 * a.energy);
        let moved: Vec<[f64; 3]> = a
            .curve
            .nodes()
            .iter()
            .map(|p| {
                let q = rot([p[0], p[1]]);
                [q[0] + shift[0], q[1] + shift[1], 0.0]
            })
            .collect();
        let moved = DiscreteCurve::new(2, moved).unwrap();
        assert!(cm_distance(&moved, &b.curve, 0).unwrap() < 1e-6);
    }

    #[test]
    fn verification_flags_unconverged_curves() {
        let g = BoundaryData::planar([0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, -1.0]).unwrap();
        let cfg = SolverConfig {
            segments: 512,
            ..SolverConfig::default()
        };
        let good = minimize_fixed_length(&g, 2.0, &cfg).unwrap();
        let ok = verify_critical(&good.curve, &g, Constraint::FixedLength(2.0), &cfg).unwrap();
        assert!(ok.passed(), "{ok:?} {}", brief(&good));
        let crude = SolverConfig {
            outer_iters: 1,
            multistart_count: 1,
            ..cfg
        };
        let bad = minimize_fixed_length(&g, 2.0, &crude).unwrap();
        let report = verify_critical(&bad.curve, &g, Constraint::FixedLength(2.0), &cfg).unwrap();
        assert!(!report.passed());
        assert!(report.residual_norm > 100.0 * cfg.grad_tol, "{}", report.residual_norm);
    }

    #[test]
    fn spatial_points_problem_converges() {
        let g = BoundaryData::new(3, [0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]).unwrap();
        let cfg = SolverConfig {
            segments: 64,
            representation: Representation::Points,
            multistart_count: 2,
            ..SolverConfig::default()
        };
        let r = minimize_fixed_length(&g, 1.6, &cfg).unwrap();
        assert!(r.constraint_violation < 1e-6, "{}", brief(&r));
        assert!(r.energy.is_finite() && r.energy > 0.0);
    }
}
