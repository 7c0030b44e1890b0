use thiserror::Error;

/// Errors produced by matrix primitives, channel validation, and dilation
/// construction.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("dimension must be even (one Q and one P row per mode), got {0}")]
    OddDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric (asymmetry {0:.3e})")]
    NotSymmetric(f64),

    #[error("matrix is not antisymmetric (residual {0:.3e})")]
    NotAntisymmetric(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("matrix is not unitary (residual {0:.3e})")]
    NotUnitary(f64),

    #[error("matrix is not symplectic (residual {0:.3e})")]
    NotSymplectic(f64),

    #[error("matrix is not orthogonal symplectic (orthogonality {orthogonality:.3e}, symplecticity {symplecticity:.3e})")]
    NotOrthogonalSymplectic {
        orthogonality: f64,
        symplecticity: f64,
    },

    #[error("matrix does not commute with the symplectic form (commutator norm {0:.3e})")]
    NotInCommutant(f64),

    #[error("blocks violate the extension relations (orthogonality {orthogonality:.3e}, symplecticity {symplecticity:.3e})")]
    ExtensionRelationsViolated {
        orthogonality: f64,
        symplecticity: f64,
    },

    #[error("covariance matrix is not a valid quantum state: {0}")]
    InvalidState(String),

    #[error("channel is not completely positive or malformed: {0}")]
    InvalidChannel(String),

    #[error("channel is not passively dilatable: {0}")]
    NotDilatable(String),

    #[error("dilation is not minimal: {0}")]
    NotMinimal(String),

    #[error("dilations do not belong to the same channel (residual {0:.3e})")]
    ChannelMismatch(f64),

    #[error("transmissivity out of range: {0}")]
    TransmissivityOutOfRange(f64),

    #[error("eigenvalue decomposition did not converge")]
    EigenFailure,

    #[error("singular value decomposition did not converge")]
    SvdFailure,

    #[error("{0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
