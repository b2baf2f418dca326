//! Minimal energy as a function of the length: continuous inside the
//! admissible set, diverging as the length approaches the chord.

use elastica::experiments::{continuity_study, minimal_energy_map, EnergySlice};
use elastica::{BoundaryData, SolverConfig};

fn main() -> elastica::Result<()> {
    let cfg = SolverConfig {
        segments: 1024,
        multistart_count: 3,
        ..SolverConfig::default()
    };
    let gamma = BoundaryData::planar_angles([0.0, 0.0], [1.0, 0.0], 0.5, -0.3)?;
    let slice = EnergySlice::Length { gamma, min: 1.001, max: 1.5 };
    let map = minimal_energy_map(&slice, 11, &cfg)?;
    for p in &map.points {
        println!("L = {:.4}: m = {:>10.4}  converged {}", p.coords[0], p.energy.unwrap_or(f64::NAN), p.converged);
    }

    let inner = EnergySlice::Length { gamma, min: 1.2, max: 1.5 };
    let jumps = continuity_study(&inner, 3, 3, &cfg)?;
    println!("\nmax adjacent jump on [1.2, 1.5] under refinement: {jumps:.4?}");
    Ok(())
}
