use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("elliptic parameter m = {0} outside [0, 1]")]
    ParameterDomain(f64),

    #[error("complete elliptic integral diverges at m = 1")]
    Divergence,

    #[error("invalid moduli: {0}")]
    InvalidModuli(String),

    #[error("curve is not planar (torsion constant c = {0})")]
    NotPlanar(f64),

    #[error("torsion is singular: curvature vanishes at s = {0} while c != 0")]
    SingularTorsion(f64),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("curve needs at least {needed} segments, got {got}")]
    Resolution { needed: usize, got: usize },

    #[error("curve is not constant-speed (max relative speed deviation {0:.3e}); resample first")]
    NotConstantSpeed(f64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("boundary graft failed: {0}")]
    GraftFailure(String),

    #[error("boundary data infeasible: |P1 - P0| = {chord} exceeds length {length}")]
    Infeasible { chord: f64, length: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("root bracketing failed: {0}")]
    Bracket(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
