//! Numerical toolkit for Euler elasticae.
//!
//! * [`elliptic`]: complete elliptic integrals and Jacobi elliptic functions.
//! * [`closedform`]: the explicit elastica families parametrized by moduli
//!   `(m, w, A, c, beta)`, their invariants, and curve reconstruction.
//! * [`curve`]: sampled curves with bending energy, Euler-Lagrange residual,
//!   multiplier estimation, `C^m` distances and boundary grafting.
//! * [`solver`]: clamped fixed-length and length-penalized minimization.
//! * [`experiments`]: counterexample sequences, dichotomy probe, minimal-energy
//!   maps and stability sweeps.
//! * [`cli`]: configuration, dispatch and on-disk artifacts for the `elastica`
//!   binary.

pub mod cli;
pub mod closedform;
pub mod curve;
pub mod elliptic;
mod error;
pub mod experiments;
pub mod solver;

pub use closedform::{ElasticaParams, FamilyKind};
pub use curve::{BoundaryClass, BoundaryData, DiscreteCurve};
pub use error::{Error, Result};
pub use solver::{Constraint, MinimizeResult, Representation, SolverConfig};
