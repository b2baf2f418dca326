//! Fixed-length clamped minimization: recover a sub-arc of a closed-form
//! elastica from its own boundary data, then list the local minima of a
//! mirror-symmetric problem.

use elastica::closedform::{analytic_bending_energy, reconstruct};
use elastica::solver::{enumerate_local_minima, minimize_fixed_length, verify_critical};
use elastica::{BoundaryData, Constraint, ElasticaParams, SolverConfig};

fn main() -> elastica::Result<()> {
    let p = ElasticaParams::orbitlike(0.5, 2.0, -0.4)?;
    let length = 1.2;
    let arc = reconstruct(&p, length, 4096)?;
    let (v0, v1) = arc.end_tangents();
    let gamma = BoundaryData::normalized(2, arc.start(), arc.end(), v0, v1)?;
    let cfg = SolverConfig {
        segments: 512,
        ..SolverConfig::default()
    };
    let t = std::time::Instant::now();
    let r = minimize_fixed_length(&gamma, length, &cfg)?;
    println!("sub-arc: energy {:.8} (arc {:.8}), lambda {:.5} (closed form {:.5})", r.energy, analytic_bending_energy(&p, length), r.lambda_est, p.lambda);
    println!(
        "         residual {:.2e}, violation {:.1e}, converged {} in {:.2?}",
        r.el_residual_norm,
        r.constraint_violation,
        r.converged,
        t.elapsed()
    );
    let report = verify_critical(&r.curve, &gamma, Constraint::FixedLength(length), &cfg)?;
    println!("         verification passed: {}", report.passed());

    let sym = BoundaryData::planar([0.0, 0.0], [3.0, 0.0], [1.0, 0.0], [1.0, 0.0])?;
    let minima = enumerate_local_minima(&sym, Constraint::FixedLength(3.6), &cfg)?;
    println!("\nsymmetric data, L = 3.6: {} clusters from {} starts", minima.clusters.len(), minima.starts_run);
    for (c, size) in minima.clusters.iter().zip(&minima.sizes) {
        let mid = c.curve.nodes()[c.curve.segments() / 2];
        println!("  energy {:.8}  midpoint height {:+.5}  found by {size} starts", c.energy, mid[1]);
    }
    println!("minimizer ambiguous: {}", minima.minimizer_ambiguous());
    Ok(())
}
