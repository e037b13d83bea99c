use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Invariant violations on user-supplied data carry the numerical residual
/// that failed, so callers can report how far off the input was.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension must be positive")]
    ZeroDimension,

    #[error("non-finite entry in matrix")]
    NonFinite,

    #[error("operator is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("trace is {trace}, expected 1")]
    InvalidTrace { trace: f64 },

    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("state vector has norm {norm}, outside the auto-normalization window")]
    NotNormalized { norm: f64 },

    #[error("state vector is zero")]
    ZeroVector,

    #[error("index {index} out of range (size {size})")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("invalid projector set: {0}")]
    InvalidProjectorSet(#[from] ProjectorViolation),

    #[error("sector {index} is unoccupied (weight {weight:.3e})")]
    UnoccupiedSector { index: usize, weight: f64 },

    #[error("dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("center is not spanned by commuting projectors: {0}")]
    SectorExtraction(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("numerical invariant violated: {0}")]
    Invariant(String),

    #[error(
        "sample entropy {sample_entropy} exceeds representative entropy {bound} (sample: {state})"
    )]
    MaxEntropyCounterexample {
        sample_entropy: f64,
        bound: f64,
        state: String,
    },
}

/// Which projector-set invariant failed, with its residual.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProjectorViolation {
    #[error("empty projector set")]
    Empty,
    #[error("projector {index} has shape {rows}x{cols}, expected {dim}x{dim}")]
    Shape {
        index: usize,
        rows: usize,
        cols: usize,
        dim: usize,
    },
    #[error("projector {index} is not Hermitian (residual {residual:.3e})")]
    NotHermitian { index: usize, residual: f64 },
    #[error("projector {index} is not idempotent (residual {residual:.3e})")]
    NotIdempotent { index: usize, residual: f64 },
    #[error("projectors {i} and {j} are not orthogonal (residual {residual:.3e})")]
    NotOrthogonal { i: usize, j: usize, residual: f64 },
    #[error("projectors do not sum to the identity (exhaustiveness residual {residual:.3e})")]
    Incomplete { residual: f64 },
    #[error("sector vectors are not orthonormal (residual {residual:.3e})")]
    NotOrthonormal { residual: f64 },
    #[error("sector bases span {count} dimensions, expected {dim}")]
    IncompleteBasis { count: usize, dim: usize },
    #[error("sector {index} has no basis vectors")]
    EmptySector { index: usize },
}

impl ProjectorViolation {
    /// Short machine-readable name of the violated invariant.
    pub fn invariant(&self) -> &'static str {
        match self {
            Self::Empty => "non_empty",
            Self::Shape { .. } => "shape",
            Self::NotHermitian { .. } => "hermitian",
            Self::NotIdempotent { .. } => "idempotent",
            Self::NotOrthogonal { .. } => "orthogonality",
            Self::Incomplete { .. } | Self::IncompleteBasis { .. } => "exhaustiveness",
            Self::NotOrthonormal { .. } => "orthonormality",
            Self::EmptySector { .. } => "non_empty_sector",
        }
    }

    pub fn residual(&self) -> Option<f64> {
        match self {
            Self::NotHermitian { residual, .. }
            | Self::NotIdempotent { residual, .. }
            | Self::NotOrthogonal { residual, .. }
            | Self::Incomplete { residual }
            | Self::NotOrthonormal { residual } => Some(*residual),
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
