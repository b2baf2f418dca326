use super::{dist, DiscreteCurve, Point};
use crate::{Error, Result};

/// Speed deviation below which resampling returns the input unchanged;
/// re-marching would only add roundoff.
const ALREADY_UNIFORM: f64 = 1e-12;

/// Piecewise cubic Hermite interpolant through the nodes, parametrized by
/// cumulative chord length, with clamped-spline slopes.
struct Spline {
    t: Vec<f64>,
    p: Vec<Point>,
    d: Vec<Point>,
}

impl Spline {
    fn new(nodes: &[Point]) -> Self {
        let n = nodes.len() - 1;
        let mut t = vec![0.0; n + 1];
        for i in 1..=n {
            t[i] = t[i - 1] + dist(&nodes[i], &nodes[i - 1]);
        }
        let d0 = lagrange_end_slope(&t[..4], &nodes[..4]);
        let rt: Vec<f64> = (0..4).map(|k| -t[n - k]).collect();
        let rp: Vec<Point> = (0..4).map(|k| nodes[n - k]).collect();
        let dn = lagrange_end_slope(&rt, &rp).map(|v| -v);

        // Tridiagonal system for interior slopes of the C^2 cubic spline.
        let mut d = vec![[0.0; 3]; n + 1];
        d[0] = d0;
        d[n] = dn;
        if n > 1 {
            let m = n - 1;
            let mut diag = vec![0.0; m];
            let mut upper = vec![0.0; m];
            let mut lower = vec![0.0; m];
            let mut rhs = vec![[0.0; 3]; m];
            for k in 0..m {
                let i = k + 1;
                let h0 = t[i] - t[i - 1];
                let h1 = t[i + 1] - t[i];
                lower[k] = h1;
                diag[k] = 2.0 * (h0 + h1);
                upper[k] = h0;
                for c in 0..3 {
                    rhs[k][c] = 3.0
                        * (h1 * (nodes[i][c] - nodes[i - 1][c]) / h0 + h0 * (nodes[i + 1][c] - nodes[i][c]) / h1);
                }
            }
            for c in 0..3 {
                rhs[0][c] -= lower[0] * d0[c];
                rhs[m - 1][c] -= upper[m - 1] * dn[c];
            }
            // Thomas algorithm; the system is strictly diagonally dominant.
            for k in 1..m {
                let w = lower[k] / diag[k - 1];
                diag[k] -= w * upper[k - 1];
                for c in 0..3 {
                    rhs[k][c] -= w * rhs[k - 1][c];
                }
            }
            for k in (0..m).rev() {
                for c in 0..3 {
                    let next = if k + 1 < m { upper[k] * d[k + 2][c] } else { 0.0 };
                    d[k + 1][c] = (rhs[k][c] - next) / diag[k];
                }
            }
        }
        Self {
            t,
            p: nodes.to_vec(),
            d,
        }
    }

    fn end(&self) -> f64 {
        *self.t.last().unwrap()
    }

    /// Evaluates on interval `j` (between knots `j` and `j + 1`).
    fn eval_in(&self, j: usize, t: f64) -> Point {
        let h = self.t[j + 1] - self.t[j];
        let s = (t - self.t[j]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let mut out = [0.0; 3];
        for c in 0..3 {
            out[c] = h00 * self.p[j][c] + h10 * h * self.d[j][c] + h01 * self.p[j + 1][c] + h11 * h * self.d[j + 1][c];
        }
        out
    }
}

/// Derivative at `t[0]` of the cubic through four points.
fn lagrange_end_slope(t: &[f64], p: &[Point]) -> Point {
    let mut out = [0.0; 3];
    // d/dt l_k(t) at t = t0.
    for k in 0..4 {
        let w = if k == 0 {
            (1..4).map(|j| 1.0 / (t[0] - t[j])).sum::<f64>()
        } else {
            let mut num = 1.0;
            let mut den = 1.0;
            for j in 0..4 {
                if j != k {
                    den *= t[k] - t[j];
                    if j != 0 {
                        num *= t[0] - t[j];
                    }
                }
            }
            num / den
        };
        for c in 0..3 {
            out[c] += w * p[k][c];
        }
    }
    out
}

/// Walks the spline in steps of fixed chord `chord`. Returns the nodes and
/// the parameter reached after `steps` steps, or `None` if the end is hit
/// first.
fn march(s: &Spline, chord: f64, steps: usize) -> (Vec<Point>, Option<f64>) {
    let mut nodes = Vec::with_capacity(steps + 1);
    let mut cur = s.p[0];
    let mut t_cur = 0.0f64;
    let mut j = 0;
    nodes.push(cur);
    let last = s.t.len() - 2;
    for _ in 0..steps {
        // First knot at least `chord` away from the current point.
        while dist(&s.p[j + 1], &cur) < chord {
            if j == last {
                return (nodes, None);
            }
            j += 1;
        }
        let (mut lo, mut hi) = (t_cur.max(s.t[j]), s.t[j + 1]);
        let f = |t: f64| dist(&s.eval_in(j, t), &cur) - chord;
        let (mut flo, mut fhi) = (f(lo), f(hi));
        let mut t = hi;
        for _ in 0..200 {
            // Regula falsi with bisection fallback (Illinois variant).
            let cand = if fhi != flo { hi - fhi * (hi - lo) / (fhi - flo) } else { 0.5 * (lo + hi) };
            t = if cand > lo && cand < hi { cand } else { 0.5 * (lo + hi) };
            let ft = f(t);
            if ft.abs() <= 1e-15 * chord || hi - lo <= 1e-15 * s.end() {
                break;
            }
            if ft < 0.0 {
                lo = t;
                flo = ft;
                fhi *= 0.5;
            } else {
                hi = t;
                fhi = ft;
                flo *= 0.5;
            }
        }
        t_cur = t;
        cur = s.eval_in(j, t);
        nodes.push(cur);
    }
    (nodes, Some(t_cur))
}

/// Reparametrizes to (discrete) constant speed: the returned curve has the
/// same number of segments, the same end points, and equal chords.
pub fn resample_constant_speed(curve: &DiscreteCurve) -> Result<DiscreteCurve> {
    resample_with_segments(curve, curve.segments())
}

/// As [`resample_constant_speed`] with a different segment count.
pub fn resample_with_segments(curve: &DiscreteCurve, segments: usize) -> Result<DiscreteCurve> {
    let total = curve.length();
    if !(total > 0.0) {
        return Err(Error::Degenerate("zero-length curve cannot be resampled".into()));
    }
    if segments == curve.segments() && curve.speed_deviation() <= ALREADY_UNIFORM {
        return Ok(curve.clone());
    }
    let s = Spline::new(curve.nodes());
    let end = s.end();
    let mut lo = 0.0;
    let mut hi = 1.05 * total / segments as f64;
    while march(&s, hi, segments).1.is_some_and(|t| t < end) {
        hi *= 1.5;
    }
    let mut best = None;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let r = march(&s, mid, segments);
        match r.1 {
            Some(t) if t < end => {
                lo = mid;
                best = Some(r.0);
            }
            _ => hi = mid,
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    let mut nodes = best.ok_or_else(|| Error::Degenerate("equal-chord march failed".into()))?;
    // Close the tiny remaining gap to the end point smoothly rather than
    // moving only the last node.
    let gap = super::sub(&curve.end(), nodes.last().unwrap());
    let steps = segments as f64;
    for (k, p) in nodes.iter_mut().enumerate() {
        *p = super::add(p, &super::scale(&gap, k as f64 / steps));
    }
    *nodes.last_mut().unwrap() = curve.end();
    DiscreteCurve::new(curve.dim(), nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_speed_input_is_unchanged() {
        let nodes: Vec<[f64; 2]> = (0..=200)
            .map(|i| {
                let a = i as f64 * 0.01;
                [a.cos(), a.sin()]
            })
            .collect();
        let c = DiscreteCurve::planar(&nodes).unwrap();
        let r = resample_constant_speed(&c).unwrap();
        for (a, b) in r.nodes().iter().zip(c.nodes()) {
            assert!(dist(a, b) < 1e-10);
        }
    }

    #[test]
    fn graded_segment_becomes_uniform() {
        let nodes: Vec<[f64; 2]> = (0..=64).map(|i| [(i as f64 / 64.0).powi(2) * 2.0, 0.0]).collect();
        let r = resample_constant_speed(&DiscreteCurve::planar(&nodes).unwrap()).unwrap();
        for (i, p) in r.nodes().iter().enumerate() {
            assert!((p[0] - 2.0 * i as f64 / 64.0).abs() < 1e-12, "{i} {p:?}");
            assert_eq!(p[1], 0.0);
        }
        assert!(r.speed_deviation() < 1e-12);
    }

    #[test]
    fn circle_gets_uniform_angles() {
        let n = 512;
        let nodes: Vec<[f64; 2]> = (0..=n)
            .map(|i| {
                let u = i as f64 / n as f64;
                let a = PI * (u + 0.3 * u * u * (1.0 - u));
                [a.cos(), a.sin()]
            })
            .collect();
        let c = DiscreteCurve::planar(&nodes).unwrap();
        assert!(!c.is_constant_speed());
        let r = resample_constant_speed(&c).unwrap();
        assert!(r.is_constant_speed(), "{}", r.speed_deviation());
        for (i, p) in r.nodes().iter().enumerate() {
            let a = p[1].atan2(p[0]);
            assert!((a - PI * i as f64 / n as f64).abs() < 1e-6, "{i} {a}");
        }
        assert!((r.length() - c.length()).abs() / c.length() < 1e-5);
    }

    #[test]
    fn refines_segment_count() {
        let c = DiscreteCurve::segment(3, [0.0; 3], [1.0, 2.0, 2.0], 16).unwrap();
        let r = resample_with_segments(&c, 48).unwrap();
        assert_eq!(r.segments(), 48);
        assert!((r.length() - 3.0).abs() < 1e-12);
    }
}
