//! Curvature concentration: a sech-shaped loop shrinking towards the start
//! point with constant energy 4 tanh(1) and multipliers 2 j^2.

use elastica::experiments::{concentration_member, concentration_sequence, CONCENTRATION_TAIL_START};

fn main() -> elastica::Result<()> {
    let reports = concentration_sequence(20, 4096)?;
    println!("{:>3} {:>12} {:>8} {:>10} {:>9}", "j", "B_j", "lambda_j", "r_j", "C1");
    for r in &reports {
        let (p, root) = concentration_member(r.index)?;
        // Curvature is decreasing past the peak, so the sup is at the left end.
        let tail = p.signed_curvature(CONCENTRATION_TAIL_START)?;
        println!(
            "{:3} {:12.9} {:8} {:10.6} {:9.3e}   k(0.5) = {tail:.2e}",
            r.index,
            r.energy,
            r.lambda,
            root,
            r.cm_distance(1)
        );
    }
    println!("4 tanh(1) = {:.9}", 4.0 * 1.0_f64.tanh());
    Ok(())
}
