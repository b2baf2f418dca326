//! Curvature oscillation: bounded energy, multipliers tending to minus
//! infinity, and C^1 convergence to a segment without smooth convergence.

use elastica::experiments::{oscillation_sequence, sequence_checks, ProbeFamily};

fn main() -> elastica::Result<()> {
    let reports = oscillation_sequence(40, 4096)?;
    println!("{:>3} {:>10} {:>10} {:>11} {:>9} {:>9} {:>9}", "j", "B_j", "sampled", "lambda_j", "C0", "C1", "C2");
    for r in reports.iter().filter(|r| r.index <= 10 || r.index % 10 == 0) {
        println!(
            "{:3} {:10.6} {:10.6} {:11.2} {:9.2e} {:9.2e} {:9.2e}",
            r.index, r.energy, r.discrete_energy, r.lambda, r.cm_distances[0], r.cm_distances[1], r.cm_distances[2]
        );
    }
    println!("pi^2 / 2 = {:.6}", std::f64::consts::PI.powi(2) / 2.0);
    for c in sequence_checks(ProbeFamily::Oscillation, &reports) {
        println!("[{}] {} {}", if c.passed { "ok" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(())
}
