//! Stability of minimizers under perturbation of the data: continuous for
//! generic data, discontinuous when closed data is opened up.

use elastica::experiments::{stability_sweep, stability_sweep_along, Perturbation};
use elastica::{BoundaryData, Constraint, SolverConfig};

fn main() -> elastica::Result<()> {
    let cfg = SolverConfig {
        segments: 512,
        ..SolverConfig::default()
    };
    let schedule: Vec<f64> = (1..=8).map(|k| 0.5f64.powi(k)).collect();

    let generic = BoundaryData::planar_angles([0.0, 0.0], [1.0, 0.0], 0.4, -0.2)?;
    let rep = stability_sweep(&generic, Constraint::FixedLength(1.1), &schedule, &cfg)?;
    println!("generic angles, L = 1.1 (reference energy {:.6})", rep.reference.energy);
    for r in &rep.rows {
        println!("  delta {:.5}: C0 {:.2e}  C1 {:.2e}  C2 {:.2e}", r.parameter, r.cm_distances[0], r.cm_distance(1), r.cm_distance(2));
    }
    println!("  monotone: {}, discontinuity: {}", rep.c2_monotone, rep.discontinuity);

    let closed = BoundaryData::planar([0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [1.0, 0.0])?;
    let opening = Perturbation {
        dp0: [0.0; 3],
        dp1: [1.0, 0.0, 0.0],
        dv0: [0.0, 0.3, 0.0],
        dv1: [0.0, -0.3, 0.0],
        dparam: 0.0,
    };
    let rep = stability_sweep_along(&closed, Constraint::Penalized(1.0), &schedule, &opening, &cfg)?;
    println!("\nclosed data opened by delta, lambda = 1 (reference: circle, E = {:.6})", rep.reference.energy);
    for r in &rep.rows {
        println!("  delta {:.5}: E {:.5}  length {:.5}  C0 {:.3}", r.parameter, r.energy, r.length, r.cm_distances[0]);
    }
    println!("  discontinuity: {}", rep.discontinuity);
    Ok(())
}
