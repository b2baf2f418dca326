//! Heterogeneous initial guesses for the multistart.
//!
//! Start `i` of a run is a deterministic function of `(i, seed)`. The first
//! five are structured (linear turning, single bump of either sign, S-shape
//! of either sign); the rest are random Fourier perturbations with decaying
//! coefficients.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::{add, cross, norm, resample_with_segments, scale, unit, BoundaryData, DiscreteCurve, Point};
use crate::Result;

const STRUCTURED: usize = 5;
const RANDOM_MODES: usize = 4;

/// Fourier coefficients `a_j` of the perturbation `sum a_j sin(j pi x)`.
pub(crate) fn coefficients(start: usize, amplitude: f64, seed: u64) -> Vec<f64> {
    let mut a = vec![0.0; RANDOM_MODES];
    match start {
        0 => {}
        1 => a[0] = amplitude,
        2 => a[0] = -amplitude,
        3 => a[1] = amplitude,
        4 => a[1] = -amplitude,
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (start as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            for (j, aj) in a.iter_mut().enumerate() {
                *aj = amplitude * rng.gen_range(-1.0..=1.0) / (j + 1) as f64;
            }
        }
    }
    a
}

/// Perturbation amplitude: enough turning to take up the slack `L - d` for
/// fixed length, a fixed half radian otherwise.
pub(crate) fn amplitude(chord: f64, length: Option<f64>) -> f64 {
    match length {
        Some(l) => (chord / l).min(1.0).acos() + 0.3,
        None => 0.5,
    }
}

/// Edge angles `theta(s_i)` at the edge midpoints `s_i = (i + 1/2) / n`.
pub(crate) fn angles(n: usize, theta_start: f64, theta_end: f64, coef: &[f64]) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let x = (i as f64 + 0.5) / n as f64;
            let bumps: f64 = coef
                .iter()
                .enumerate()
                .map(|(j, a)| a * ((j + 1) as f64 * PI * x).sin())
                .sum();
            theta_start + (theta_end - theta_start) * x + bumps
        })
        .collect()
}

/// Initial length for penalized start `i`: the chord plus a whole number of
/// natural lengths `lambda^{-1/2}`, scaled with the prescribed turning.
pub(crate) fn penalized_length(chord: f64, lambda: f64, turning: f64, start: usize) -> f64 {
    let base = turning.abs().max(1.0).round() as i64;
    let k = (base + (start % 3) as i64 - 1).max(1);
    chord + k as f64 / lambda.sqrt()
}

/// Node positions for the point representation: the cubic Hermite
/// interpolant of the clamped data, with tangents scaled to the target
/// length, plus sine bumps in a start-dependent normal direction, resampled
/// to `n` equal chords.
pub(crate) fn hermite_nodes(
    gamma: &BoundaryData,
    length: f64,
    n: usize,
    start: usize,
    amplitude: f64,
    seed: u64,
) -> Result<DiscreteCurve> {
    let coef = coefficients(start, amplitude, seed);
    let chord = gamma.chord_vector();
    // A direction transversal to the chord (or to V0 for closed data).
    let base = if norm(&chord) > 1e-12 { unit(&chord) } else { gamma.v0 };
    let mut normal = if gamma.dim == 2 {
        [-base[1], base[0], 0.0]
    } else {
        let helper = if base[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        unit(&cross(&base, &helper))
    };
    if gamma.dim == 3 && start >= STRUCTURED {
        // Rotate the bump plane about the chord.
        let phi = start as f64 * 2.399_963;
        let other = cross(&base, &normal);
        normal = add(&scale(&normal, phi.cos()), &scale(&other, phi.sin()));
    }
    let fine = 4 * n;
    let nodes: Vec<Point> = (0..=fine)
        .map(|i| {
            let t = i as f64 / fine as f64;
            let (h00, h10, h01, h11) = (
                2.0 * t.powi(3) - 3.0 * t * t + 1.0,
                t.powi(3) - 2.0 * t * t + t,
                -2.0 * t.powi(3) + 3.0 * t * t,
                t.powi(3) - t * t,
            );
            let mut p = add(
                &add(&scale(&gamma.p0, h00), &scale(&gamma.v0, h10 * length)),
                &add(&scale(&gamma.p1, h01), &scale(&gamma.v1, h11 * length)),
            );
            let bump: f64 = coef
                .iter()
                .enumerate()
                .map(|(j, a)| a * ((j + 1) as f64 * PI * t).sin())
                .sum();
            // sin^2 envelope keeps the end tangents.
            let envelope = (PI * t).sin().powi(2);
            p = add(&p, &scale(&normal, 0.25 * length * bump * envelope));
            p
        })
        .collect();
    resample_with_segments(&DiscreteCurve::new(gamma.dim, nodes)?, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn starts_are_deterministic_and_distinct() {
        let a = coefficients(7, 1.0, 42);
        assert_eq!(a, coefficients(7, 1.0, 42));
        assert_ne!(a, coefficients(8, 1.0, 42));
        assert_ne!(a, coefficients(7, 1.0, 43));
        assert!(coefficients(0, 1.0, 0).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn angles_interpolate_the_end_values() {
        let th = angles(1000, 0.2, 1.4, &coefficients(3, 0.5, 0));
        assert!((th[0] - 0.2).abs() < 1e-2);
        assert!((th[999] - 1.4).abs() < 1e-2);
    }

    #[test]
    fn penalized_lengths_exceed_the_chord() {
        for i in 0..6 {
            assert!(penalized_length(0.0, 4.0, 0.0, i) >= 0.5);
        }
        assert!((penalized_length(0.0, 1.0, 2.0 * PI, 1) - 6.0).abs() < 1e-12);
    }
}
