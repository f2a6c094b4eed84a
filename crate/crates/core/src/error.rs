use thiserror::Error;

/// Errors raised by the numerical layers of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("Jacobi eigenvalue iteration did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("Bloch vector length {0} exceeds 1")]
    BlochVectorTooLong(f64),
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("state is not pure (purity {0})")]
    NotPure(f64),
    #[error("unknown channel `{0}`")]
    UnknownChannel(String),
    #[error("parameter {value} for `{name}` is outside [0, 1]")]
    ParameterOutOfRange { name: String, value: f64 },
    #[error("map is not trace preserving (deviation {0:e})")]
    NotTracePreserving(f64),
    #[error("a Kraus channel needs between 1 and 4 operators, got {0}")]
    KrausCount(usize),
    #[error("affine map sends a Bloch vector outside the unit ball (length {0})")]
    LeavesBlochBall(f64),
    #[error("invalid {what}: {reason}")]
    InvalidParameter { what: &'static str, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
