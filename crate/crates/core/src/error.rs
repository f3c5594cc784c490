use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the field, media, evolution and band modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Two operands live on different grids or have inconsistent lengths.
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// An argument is outside the domain the operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),
    /// A field is in the wrong representation for the requested operation.
    #[error("state error: expected {expected} representation, found {found}")]
    State { expected: &'static str, found: &'static str },
    /// The overlap matrix of a Bloch problem is numerically singular.
    #[error(
        "ill-conditioned overlap matrix (reciprocal condition {rcond:.3e}); \
         Fourier coefficient {index:?} = {value}"
    )]
    Conditioning { index: [i64; 3], value: Complex64, rcond: f64 },
    /// An iterative routine did not converge.
    #[error("no convergence: {0}")]
    Convergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
