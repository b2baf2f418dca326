//! Bounded multipliers go with smooth convergence; unbounded ones with a
//! segment limit.

use elastica::experiments::{dichotomy_probe, ProbeFamily};
use elastica::ElasticaParams;

fn main() -> elastica::Result<()> {
    let fixed = ProbeFamily::Constant {
        params: ElasticaParams::orbitlike(0.5, 2.0, -0.3)?,
        length: 1.5,
    };
    let table = dichotomy_probe(&[fixed, ProbeFamily::Oscillation, ProbeFamily::Concentration], 16, 2048)?;
    for v in &table.verdicts {
        println!(
            "{:>13}: lambda bounded {:5}, C2 floor {:8.4}, limit {:?}, consistent {}",
            v.family, v.lambda_bounded, v.c2_floor, v.limit, v.consistent
        );
    }
    Ok(())
}
