//! Sampled curves on the unit parameter interval.
//!
//! A [`DiscreteCurve`] stores `N + 1` nodes at the uniform parameters
//! `x_i = i / N`. Planar curves are stored with a zero third coordinate so
//! that every operation works on `[f64; 3]`; `dim` records the ambient
//! dimension for output.
//!
//! "Constant speed" means equal chord lengths between consecutive nodes, so
//! the discrete speed `|gamma_{i+1} - gamma_i| * N` equals the polyline
//! length `L` on every segment.

mod boundary;
mod csv;
mod distance;
mod energy;
mod graft;
mod resample;
mod residual;

pub use boundary::{BoundaryClass, BoundaryData, FixedLengthClass, PenalizedClass};
pub use csv::{parse_csv, read_csv, to_csv, write_csv};
pub use distance::{cm_distance, cm_distances};
pub use energy::{bending_energy, energy_identity_check, tangent_turn_bound_check, EnergyIdentity};
pub use graft::{boundary_graft, cutoff};
pub use resample::{resample_constant_speed, resample_with_segments};
pub use residual::{default_stride, el_residual, el_residual_with_stride, estimate_multiplier, ElResidual, MultiplierEstimate};

use crate::{Error, Result};

pub type Point = [f64; 3];

/// Fewest segments a curve may have.
pub const MIN_SEGMENTS: usize = 16;

/// Largest relative chord-length deviation still accepted as constant speed.
pub const CONSTANT_SPEED_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteCurve {
    dim: usize,
    nodes: Vec<Point>,
    length: f64,
}

impl DiscreteCurve {
    pub fn new(dim: usize, nodes: Vec<Point>) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidArgument(format!("curves live in R^2 or R^3, got n = {dim}")));
        }
        if nodes.len() < MIN_SEGMENTS + 1 {
            return Err(Error::Resolution {
                needed: MIN_SEGMENTS,
                got: nodes.len().saturating_sub(1),
            });
        }
        if nodes.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Degenerate("non-finite node coordinate".into()));
        }
        if dim == 2 && nodes.iter().any(|p| p[2] != 0.0) {
            return Err(Error::InvalidArgument("planar curve with nonzero z coordinate".into()));
        }
        let mut length = 0.0;
        for (i, w) in nodes.windows(2).enumerate() {
            let chord = dist(&w[0], &w[1]);
            if chord == 0.0 {
                return Err(Error::Degenerate(format!("nodes {i} and {} coincide", i + 1)));
            }
            length += chord;
        }
        Ok(Self { dim, nodes, length })
    }

    pub fn planar(points: &[[f64; 2]]) -> Result<Self> {
        Self::new(2, points.iter().map(|p| [p[0], p[1], 0.0]).collect())
    }

    /// Straight segment from `start` to `end`, uniformly sampled.
    pub fn segment(dim: usize, start: Point, end: Point, segments: usize) -> Result<Self> {
        let nodes = (0..=segments)
            .map(|i| {
                let t = i as f64 / segments as f64;
                lerp(&start, &end, t)
            })
            .collect();
        Self::new(dim, nodes)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn into_nodes(self) -> Vec<Point> {
        self.nodes
    }

    /// Number of segments `N`.
    pub fn segments(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Polyline length.
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn start(&self) -> Point {
        self.nodes[0]
    }

    pub fn end(&self) -> Point {
        self.nodes[self.segments()]
    }

    /// Parameter value of node `i`.
    pub fn parameter(&self, i: usize) -> f64 {
        i as f64 / self.segments() as f64
    }

    /// Discrete speed `|gamma_{i+1} - gamma_i| * N` of each segment.
    pub fn speeds(&self) -> Vec<f64> {
        let n = self.segments() as f64;
        self.nodes.windows(2).map(|w| dist(&w[0], &w[1]) * n).collect()
    }

    /// `max_i |speed_i - L| / L`.
    pub fn speed_deviation(&self) -> f64 {
        let l = self.length;
        self.speeds()
            .into_iter()
            .map(|v| (v - l).abs() / l)
            .fold(0.0, f64::max)
    }

    pub fn is_constant_speed(&self) -> bool {
        self.speed_deviation() <= CONSTANT_SPEED_TOL
    }

    pub(crate) fn require_constant_speed(&self) -> Result<()> {
        let dev = self.speed_deviation();
        if dev > CONSTANT_SPEED_TOL {
            return Err(Error::NotConstantSpeed(dev));
        }
        Ok(())
    }

    /// Unit tangents at both ends.
    ///
    /// The first (last) edge direction is extrapolated half a segment
    /// outward by continuing the rotation from the neighbouring edge, which
    /// is second-order accurate and exact for circles. For planar curves
    /// this is the angle extrapolation `theta_0 = (3 theta_1 - theta_2) / 2`.
    pub fn end_tangents(&self) -> (Point, Point) {
        let n = self.segments();
        let e1 = unit(&sub(&self.nodes[1], &self.nodes[0]));
        let e2 = unit(&sub(&self.nodes[2], &self.nodes[1]));
        let f1 = unit(&sub(&self.nodes[n], &self.nodes[n - 1]));
        let f2 = unit(&sub(&self.nodes[n - 1], &self.nodes[n - 2]));
        (slerp(&e2, &e1, 1.5), slerp(&f2, &f1, 1.5))
    }

    /// Unit tangent of each segment.
    pub fn edge_tangents(&self) -> Vec<Point> {
        self.nodes.windows(2).map(|w| unit(&sub(&w[1], &w[0]))).collect()
    }

    /// Signed turning angles of a planar curve at its interior nodes.
    pub fn turning_angles(&self) -> Vec<f64> {
        let t = self.edge_tangents();
        t.windows(2)
            .map(|w| {
                if self.dim == 2 {
                    let cross = w[0][0] * w[1][1] - w[0][1] * w[1][0];
                    cross.atan2(dot(&w[0], &w[1]))
                } else {
                    norm(&cross(&w[0], &w[1])).atan2(dot(&w[0], &w[1]))
                }
            })
            .collect()
    }

    /// Curvature vectors `d^2 gamma / ds^2` at every node: centered second
    /// differences inside, second-order one-sided stencils at the ends.
    pub fn curvature_vectors(&self) -> Vec<Point> {
        let n = self.segments();
        let ds = self.length / n as f64;
        let inv = 1.0 / (ds * ds);
        let p = &self.nodes;
        let mut out = Vec::with_capacity(n + 1);
        let one_sided = |a: &Point, b: &Point, c: &Point, d: &Point| {
            let mut v = [0.0; 3];
            for k in 0..3 {
                v[k] = (2.0 * a[k] - 5.0 * b[k] + 4.0 * c[k] - d[k]) * inv;
            }
            v
        };
        out.push(one_sided(&p[0], &p[1], &p[2], &p[3]));
        for i in 1..n {
            let mut v = [0.0; 3];
            for k in 0..3 {
                v[k] = (p[i + 1][k] - 2.0 * p[i][k] + p[i - 1][k]) * inv;
            }
            out.push(v);
        }
        out.push(one_sided(&p[n], &p[n - 1], &p[n - 2], &p[n - 3]));
        out
    }

    pub fn translated(&self, b: Point) -> Self {
        let nodes = self.nodes.iter().map(|p| add(p, &b)).collect();
        Self {
            dim: self.dim,
            nodes,
            length: self.length,
        }
    }

    /// Applies `p -> R p` with a 3x3 row-major matrix. Planar curves must be
    /// mapped by rotations about the z axis.
    pub fn transformed(&self, rotation: &[[f64; 3]; 3]) -> Result<Self> {
        let nodes = self
            .nodes
            .iter()
            .map(|p| {
                let mut q = [0.0; 3];
                for (r, row) in rotation.iter().enumerate() {
                    q[r] = row[0] * p[0] + row[1] * p[1] + row[2] * p[2];
                }
                if self.dim == 2 {
                    q[2] = 0.0;
                }
                q
            })
            .collect();
        Self::new(self.dim, nodes)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.dim, self.nodes.iter().map(|p| scale(p, factor)).collect())
    }

    /// Reverses the orientation (node `i` becomes node `N - i`).
    pub fn reversed(&self) -> Self {
        let mut nodes = self.nodes.clone();
        nodes.reverse();
        Self {
            dim: self.dim,
            nodes,
            length: self.length,
        }
    }
}

// Small vector helpers shared across the crate.

pub(crate) fn add(a: &Point, b: &Point) -> Point {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub(crate) fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn scale(a: &Point, s: f64) -> Point {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub(crate) fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: &Point, b: &Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn dist(a: &Point, b: &Point) -> f64 {
    norm(&sub(a, b))
}

pub(crate) fn unit(a: &Point) -> Point {
    scale(a, 1.0 / norm(a))
}

pub(crate) fn lerp(a: &Point, b: &Point, t: f64) -> Point {
    [
        a[0] + t * (b[0] - a[0]),
        a[1] + t * (b[1] - a[1]),
        a[2] + t * (b[2] - a[2]),
    ]
}

/// Spherical interpolation between unit vectors; `t` outside `[0, 1]`
/// extrapolates along the same great circle.
pub(crate) fn slerp(a: &Point, b: &Point, t: f64) -> Point {
    let c = dot(a, b).clamp(-1.0, 1.0);
    let s = norm(&cross(a, b));
    let omega = s.atan2(c);
    if omega < 1e-12 {
        return unit(&lerp(a, b, t));
    }
    let wa = ((1.0 - t) * omega).sin() / omega.sin();
    let wb = (t * omega).sin() / omega.sin();
    unit(&add(&scale(a, wa), &scale(b, wb)))
}
