use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{BoundaryData, FixedLengthClass};
use crate::solver::{minimize_fixed_length, SolverConfig};
use crate::{Error, Result};

/// A one- or two-parameter family of fixed-length problems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EnergySlice {
    /// Fixed data, length from `min` to `max`.
    Length { gamma: BoundaryData, min: f64, max: f64 },
    /// Planar data with fixed endpoints and start angle; the end angle and
    /// the length vary over the given ranges.
    LengthAndAngle {
        p0: [f64; 2],
        p1: [f64; 2],
        angle0: f64,
        angle1: (f64, f64),
        length: (f64, f64),
    },
}

impl EnergySlice {
    fn axes(&self) -> usize {
        match self {
            EnergySlice::Length { .. } => 1,
            EnergySlice::LengthAndAngle { .. } => 2,
        }
    }

    /// Problem at grid coordinates `t` in `[0, 1]^axes`.
    fn problem(&self, t: &[f64]) -> Result<(BoundaryData, f64, Vec<f64>)> {
        let lerp = |(a, b): (f64, f64), s: f64| a + (b - a) * s;
        match *self {
            EnergySlice::Length { gamma, min, max } => {
                let l = lerp((min, max), t[0]);
                Ok((gamma, l, vec![l]))
            }
            EnergySlice::LengthAndAngle {
                p0,
                p1,
                angle0,
                angle1,
                length,
            } => {
                let l = lerp(length, t[0]);
                let a1 = lerp(angle1, t[1]);
                Ok((BoundaryData::planar_angles(p0, p1, angle0, a1)?, l, vec![l, a1]))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyMapPoint {
    /// Grid indices, one per axis.
    pub cell: Vec<usize>,
    /// `[L]` or `[L, angle1]`.
    pub coords: Vec<f64>,
    pub energy: Option<f64>,
    pub converged: bool,
    pub class: Option<FixedLengthClass>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyMap {
    pub resolution: usize,
    /// Row-major over the axes.
    pub points: Vec<EnergyMapPoint>,
    /// Largest energy difference between grid neighbours that both solved.
    pub max_adjacent_jump: f64,
}

/// Minimal energy on a `resolution`-point grid per axis (endpoints
/// included). Solver failures are recorded per point.
pub fn minimal_energy_map(slice: &EnergySlice, resolution: usize, cfg: &SolverConfig) -> Result<EnergyMap> {
    if resolution < 2 {
        return Err(Error::InvalidArgument(format!("map resolution {resolution} must be at least 2")));
    }
    cfg.validate()?;
    let axes = slice.axes();
    let cells: Vec<Vec<usize>> = match axes {
        1 => (0..resolution).map(|i| vec![i]).collect(),
        _ => (0..resolution)
            .flat_map(|i| (0..resolution).map(move |k| vec![i, k]))
            .collect(),
    };
    let step = 1.0 / (resolution - 1) as f64;
    let points: Vec<EnergyMapPoint> = cells
        .into_par_iter()
        .map(|cell| {
            let t: Vec<f64> = cell.iter().map(|&i| i as f64 * step).collect();
            let (gamma, length, coords) = match slice.problem(&t) {
                Ok(p) => p,
                Err(e) => {
                    return EnergyMapPoint {
                        cell,
                        coords: t,
                        energy: None,
                        converged: false,
                        class: None,
                        error: Some(e.to_string()),
                    }
                }
            };
            let class = Some(gamma.fixed_length_class(length));
            match minimize_fixed_length(&gamma, length, cfg) {
                Ok(r) => EnergyMapPoint {
                    cell,
                    coords,
                    energy: Some(r.energy),
                    converged: r.converged,
                    class,
                    error: None,
                },
                Err(e) => EnergyMapPoint {
                    cell,
                    coords,
                    energy: None,
                    converged: false,
                    class,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let max_adjacent_jump = max_jump(&points, resolution, axes);
    Ok(EnergyMap {
        resolution,
        points,
        max_adjacent_jump,
    })
}

fn max_jump(points: &[EnergyMapPoint], resolution: usize, axes: usize) -> f64 {
    let at = |cell: &[usize]| -> Option<f64> {
        let idx = cell.iter().fold(0, |acc, &i| acc * resolution + i);
        points[idx].energy
    };
    let mut worst: f64 = 0.0;
    for p in points {
        for axis in 0..axes {
            if p.cell[axis] + 1 < resolution {
                let mut next = p.cell.clone();
                next[axis] += 1;
                if let (Some(a), Some(b)) = (p.energy, at(&next)) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
    }
    worst
}

/// `max_adjacent_jump` at resolutions `r, 2r - 1, 4r - 3, ...` (each level
/// halves the grid spacing), for `levels` levels.
pub fn continuity_study(slice: &EnergySlice, resolution: usize, levels: usize, cfg: &SolverConfig) -> Result<Vec<f64>> {
    let mut r = resolution;
    let mut out = Vec::with_capacity(levels);
    for _ in 0..levels {
        out.push(minimal_energy_map(slice, r, cfg)?.max_adjacent_jump);
        r = 2 * r - 1;
    }
    Ok(out)
}
