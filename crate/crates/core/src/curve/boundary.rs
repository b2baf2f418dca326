use serde::{Deserialize, Serialize};

use super::{dist, norm, scale, sub, Point};
use crate::{Error, Result};

/// Relative tolerance for membership in the degenerate classes.
pub const CLASS_TOL: f64 = 1e-9;

/// Clamped boundary data: endpoint positions and unit tangents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryData {
    pub dim: usize,
    pub p0: Point,
    pub p1: Point,
    pub v0: Point,
    pub v1: Point,
}

/// Admissibility of `(Gamma, L)` for the fixed-length problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FixedLengthClass {
    /// `|P1 - P0| < L`: generic, a segment is not admissible.
    Aprime,
    /// `|P1 - P0| = L` with both tangents along the chord: only the segment.
    As,
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PenalizedClass {
    Xprime,
    /// `P0 != P1` and both tangents along the chord.
    Xs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryClass {
    pub fixed_length: FixedLengthClass,
    pub penalized: PenalizedClass,
    /// `P0 = P1` and `V0 = V1`.
    pub closed: bool,
}

impl BoundaryData {
    /// Validates that both tangents are unit vectors to `1e-12`.
    pub fn new(dim: usize, p0: Point, p1: Point, v0: Point, v1: Point) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidArgument(format!("boundary data in R^{dim}")));
        }
        for (name, v) in [("V0", &v0), ("V1", &v1)] {
            if (norm(v) - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be a unit vector (|{name}| = {})",
                    norm(v)
                )));
            }
        }
        if dim == 2 && [p0, p1, v0, v1].iter().any(|p| p[2] != 0.0) {
            return Err(Error::InvalidArgument("planar boundary data with z != 0".into()));
        }
        if [p0, p1, v0, v1].iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite boundary data".into()));
        }
        Ok(Self { dim, p0, p1, v0, v1 })
    }

    /// Like [`BoundaryData::new`] but normalizes the tangents first.
    pub fn normalized(dim: usize, p0: Point, p1: Point, v0: Point, v1: Point) -> Result<Self> {
        let nv0 = norm(&v0);
        let nv1 = norm(&v1);
        if nv0 == 0.0 || nv1 == 0.0 {
            return Err(Error::InvalidArgument("zero tangent vector".into()));
        }
        Self::new(dim, p0, p1, scale(&v0, 1.0 / nv0), scale(&v1, 1.0 / nv1))
    }

    pub fn planar(p0: [f64; 2], p1: [f64; 2], v0: [f64; 2], v1: [f64; 2]) -> Result<Self> {
        let lift = |p: [f64; 2]| [p[0], p[1], 0.0];
        Self::normalized(2, lift(p0), lift(p1), lift(v0), lift(v1))
    }

    /// Planar data with tangents given by angles.
    pub fn planar_angles(p0: [f64; 2], p1: [f64; 2], angle0: f64, angle1: f64) -> Result<Self> {
        Self::planar(p0, p1, [angle0.cos(), angle0.sin()], [angle1.cos(), angle1.sin()])
    }

    pub fn chord(&self) -> f64 {
        dist(&self.p1, &self.p0)
    }

    pub fn chord_vector(&self) -> Point {
        sub(&self.p1, &self.p0)
    }

    /// Both tangents equal to `direction` (a unit vector) within tolerance.
    fn tangents_along(&self, direction: &Point) -> bool {
        dist(&self.v0, direction) <= CLASS_TOL && dist(&self.v1, direction) <= CLASS_TOL
    }

    pub fn fixed_length_class(&self, length: f64) -> FixedLengthClass {
        let chord = self.chord();
        let tol = CLASS_TOL * length.max(f64::MIN_POSITIVE);
        if !(length > 0.0) {
            return FixedLengthClass::Infeasible;
        }
        if (chord - length).abs() <= tol {
            let dir = scale(&self.chord_vector(), 1.0 / chord);
            if self.tangents_along(&dir) {
                return FixedLengthClass::As;
            }
            return FixedLengthClass::Infeasible;
        }
        if chord < length {
            FixedLengthClass::Aprime
        } else {
            FixedLengthClass::Infeasible
        }
    }

    pub fn penalized_class(&self) -> PenalizedClass {
        let chord = self.chord();
        if chord > CLASS_TOL * (norm(&self.p0) + norm(&self.p1)).max(1.0) {
            let dir = scale(&self.chord_vector(), 1.0 / chord);
            if self.tangents_along(&dir) {
                return PenalizedClass::Xs;
            }
        }
        PenalizedClass::Xprime
    }

    pub fn is_closed(&self) -> bool {
        let scale_ = (norm(&self.p0) + norm(&self.p1)).max(1.0);
        self.chord() <= CLASS_TOL * scale_ && dist(&self.v0, &self.v1) <= CLASS_TOL
    }

    pub fn classify(&self, length: f64) -> BoundaryClass {
        BoundaryClass {
            fixed_length: self.fixed_length_class(length),
            penalized: self.penalized_class(),
            closed: self.is_closed(),
        }
    }

    /// `max_i |<P1 - P0, V_i>| < |P1 - P0|`, the generic-angle condition
    /// under which short clamped problems have a unique minimizer.
    pub fn has_generic_angles(&self) -> bool {
        let d = self.chord_vector();
        let chord = self.chord();
        chord > 0.0 && super::dot(&d, &self.v0).abs().max(super::dot(&d, &self.v1).abs()) < chord * (1.0 - CLASS_TOL)
    }

    /// Applies `p -> R p + b` to positions and `v -> R v` to tangents.
    pub fn transformed(&self, rotation: &[[f64; 3]; 3], shift: Point) -> Result<Self> {
        let apply = |p: &Point| {
            let mut q = [0.0; 3];
            for (r, row) in rotation.iter().enumerate() {
                q[r] = row[0] * p[0] + row[1] * p[1] + row[2] * p[2];
            }
            q
        };
        let p0 = super::add(&apply(&self.p0), &shift);
        let p1 = super::add(&apply(&self.p1), &shift);
        Self::normalized(self.dim, p0, p1, apply(&self.v0), apply(&self.v1))
    }
}
