//! Length-penalized minimization with closed clamped data: the minimizer is
//! a circle of radius 1/sqrt(lambda), found twice (once per orientation).

use std::f64::consts::PI;

use elastica::solver::{enumerate_local_minima, minimize_penalized};
use elastica::{BoundaryData, Constraint, SolverConfig};

fn main() -> elastica::Result<()> {
    let gamma = BoundaryData::planar([0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [1.0, 0.0])?;
    let cfg = SolverConfig::default();
    for lambda in [0.5, 1.0, 2.0] {
        let r = minimize_penalized(&gamma, lambda, &cfg)?;
        let bound = 4.0 * PI * lambda.sqrt();
        println!(
            "lambda {lambda}: E = {:.6}, 4 pi sqrt(lambda) = {bound:.6} (rel. gap {:.1e}), length {:.6}",
            r.energy,
            (r.energy - bound) / bound,
            r.length
        );
    }
    let minima = enumerate_local_minima(&gamma, Constraint::Penalized(1.0), &cfg)?;
    for c in &minima.clusters {
        println!("cluster: E = {:.6}, turning = {:+.4}", c.energy, c.turning.unwrap_or(f64::NAN));
    }
    println!("near ties: {:?}", minima.near_ties);
    Ok(())
}
