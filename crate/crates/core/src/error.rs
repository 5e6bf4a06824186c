use thiserror::Error;

use crate::geometry::PlanePoint;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("invalid puncture set: {0}")]
    InvalidPunctures(String),

    #[error("path is not closed (endpoint gap {gap:.3e})")]
    NonClosedPath { gap: f64 },

    #[error("paths are not contiguous (endpoint gap {gap:.3e})")]
    NonContiguous { gap: f64 },

    #[error("point lies on the path (distance {distance:.3e})")]
    PointOnPath { distance: f64 },

    #[error("winding number did not settle to an integer (residual {residual:.3e})")]
    WindingUnresolved { residual: f64 },

    #[error("pole proximity: ({x}, {y}) is {distance:.3e} from a puncture", x = point.x, y = point.y)]
    PoleProximity { point: PlanePoint, distance: f64 },

    #[error("transport did not converge within {steps} steps")]
    NoConvergence { steps: usize },

    #[error("step count {found} below the minimum {min}")]
    TooFewSteps { found: usize, min: usize },

    #[error("non-finite value encountered during integration")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("tolerance {0:e} outside the accepted range [1e-13, 1e-2]")]
    InvalidTolerance(f64),

    #[error("invalid connection: {0}")]
    InvalidConnection(String),

    #[error("invalid grid region: {0}")]
    InvalidRegion(String),

    #[error("invalid Lie basis: {0}")]
    InvalidBasis(String),

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("residues do not commute (commutator norm {norm:.3e})")]
    NonCommutingResidues { norm: f64 },

    #[error("unknown generator label `{0}`")]
    UnknownLabel(String),

    #[error("custom connection flatness is not verified; pass --assume-flat to proceed")]
    FlatnessNotAcknowledged,

    #[error("connection has no punctures")]
    NoPunctures,

    #[error("generator leaves the span of the Lie basis (residual {residual:.3e})")]
    BasisMismatch { residual: f64 },

    #[error("matrix is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("matrix is not an involution (defect {defect:.3e})")]
    NotInvolution { defect: f64 },

    #[error("matrix is singular")]
    Singular,
}
