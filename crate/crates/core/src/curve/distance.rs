use super::{norm, sub, DiscreteCurve, Point};
use crate::{Error, Result};

/// Highest derivative order supported by the finite-difference stencils.
pub const MAX_ORDER: usize = 4;

/// `sup_x |d^k/dx^k (gamma_1 - gamma_2)|` for `k = 0..=order`, in the uniform
/// parameter `x in [0, 1]`.
///
/// Orders up to 2 use second-order central stencils inside and second-order
/// one-sided stencils at the ends; orders 3 and 4 use the same construction
/// and are a proxy for the true `C^m` norm whose noise grows like `N^k`.
pub fn cm_distances(a: &DiscreteCurve, b: &DiscreteCurve, order: usize) -> Result<Vec<f64>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    if a.segments() != b.segments() {
        return Err(Error::InvalidArgument(format!(
            "segment counts differ ({} vs {}); resample first",
            a.segments(),
            b.segments()
        )));
    }
    if order > MAX_ORDER {
        return Err(Error::InvalidArgument(format!("derivative order {order} > {MAX_ORDER}")));
    }
    let d: Vec<Point> = a.nodes().iter().zip(b.nodes()).map(|(p, q)| sub(p, q)).collect();
    let n = d.len() - 1;
    let h = 1.0 / n as f64;
    let mut out = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let mut worst: f64 = 0.0;
        for i in 0..=n {
            worst = worst.max(norm(&derivative(&d, i, k, h)));
        }
        out.push(worst);
    }
    Ok(out)
}

/// `max_k` of [`cm_distances`].
pub fn cm_distance(a: &DiscreteCurve, b: &DiscreteCurve, order: usize) -> Result<f64> {
    Ok(cm_distances(a, b, order)?.into_iter().fold(0.0, f64::max))
}

fn derivative(d: &[Point], i: usize, k: usize, h: f64) -> Point {
    let n = d.len() - 1;
    let (central, forward): (&[f64], &[f64]) = match k {
        0 => return d[i],
        1 => (&[-0.5, 0.0, 0.5], &[-1.5, 2.0, -0.5]),
        2 => (&[1.0, -2.0, 1.0], &[2.0, -5.0, 4.0, -1.0]),
        3 => (&[-0.5, 1.0, 0.0, -1.0, 0.5], &[-2.5, 9.0, -12.0, 7.0, -1.5]),
        _ => (&[1.0, -4.0, 6.0, -4.0, 1.0], &[3.0, -14.0, 26.0, -24.0, 11.0, -2.0]),
    };
    let half = central.len() / 2;
    let scale = h.powi(k as i32);
    let mut v = [0.0; 3];
    if i >= half && i + half <= n {
        for (j, c) in central.iter().enumerate() {
            let p = &d[i + j - half];
            for a in 0..3 {
                v[a] += c * p[a];
            }
        }
    } else if i < half {
        for (j, c) in forward.iter().enumerate() {
            let p = &d[i + j];
            for a in 0..3 {
                v[a] += c * p[a];
            }
        }
    } else {
        let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
        for (j, c) in forward.iter().enumerate() {
            let p = &d[i - j];
            for a in 0..3 {
                v[a] += sign * c * p[a];
            }
        }
    }
    [v[0] / scale, v[1] / scale, v[2] / scale]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(f: impl Fn(f64) -> [f64; 2], n: usize) -> DiscreteCurve {
        let nodes: Vec<[f64; 2]> = (0..=n).map(|i| f(i as f64 / n as f64)).collect();
        DiscreteCurve::planar(&nodes).unwrap()
    }

    #[test]
    fn identical_and_translated() {
        let c = sample(|x| [x.cos(), x.sin()], 128);
        assert_eq!(cm_distance(&c, &c, 3).unwrap(), 0.0);
        let moved = c.translated([0.3, -0.4, 0.0]);
        let d = cm_distances(&moved, &c, 3).unwrap();
        assert!((d[0] - 0.5).abs() < 1e-12);
        assert!(d[1..].iter().all(|&v| v < 1e-6), "{d:?}");
    }

    #[test]
    fn polynomial_difference_is_differentiated_exactly() {
        // Difference x^2 * (1, 0): derivatives 2x, 2, 0 -> sup 2, 2, 0.
        let a = sample(|x| [x + x * x, 0.5 * x], 64);
        let b = sample(|x| [x, 0.5 * x], 64);
        let d = cm_distances(&a, &b, 3).unwrap();
        assert!((d[0] - 1.0).abs() < 1e-12);
        assert!((d[1] - 2.0).abs() < 1e-9);
        assert!((d[2] - 2.0).abs() < 1e-6);
        assert!(d[3] < 1e-3);
    }

    #[test]
    fn mismatched_inputs() {
        let a = sample(|x| [x, 0.0], 32);
        let b = sample(|x| [x, 0.0], 64);
        assert!(cm_distance(&a, &b, 1).is_err());
        let c = DiscreteCurve::segment(3, [0.0; 3], [1.0, 0.0, 0.0], 32).unwrap();
        assert!(matches!(cm_distance(&a, &c, 1), Err(Error::DimensionMismatch(2, 3))));
        assert!(cm_distance(&a, &a, 5).is_err());
    }
}
