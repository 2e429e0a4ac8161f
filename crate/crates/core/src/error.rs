//! Crate-wide error type.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A modulus that is not a prime number was used to build a prime field.
    #[error("{0} is not prime")]
    NotPrime(u64),

    /// Operands live over different ground fields.
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),

    /// Matrix or tuple dimensions do not fit the operation.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A square matrix or tuple was required.
    #[error("not square: {0}")]
    NotSquare(String),

    /// Inversion of a singular matrix was attempted.
    #[error("matrix is singular")]
    SingularMatrix,

    /// The prime-field characteristic is too small for a trace-form or
    /// derivative-based computation to be sound.
    #[error("characteristic {p} is too small (need > {needed})")]
    CharacteristicTooSmall { p: u64, needed: usize },

    /// Rational factorization was requested above the configured degree bound.
    #[error("degree {degree} exceeds the factorization bound {bound}")]
    DegreeLimitExceeded { degree: usize, bound: usize },

    /// Witness construction received a module whose coefficient stack does not
    /// have full column rank (in particular the zero module); such modules
    /// carry trivial summands that can never separate tuples of a fixed shape.
    #[error("module admits no separating pencil: coefficient stack is column-rank deficient")]
    ZeroModule,

    /// Text input could not be parsed.
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },

    /// A scalar literal was malformed for the target field.
    #[error("invalid scalar {text:?}: {reason}")]
    InvalidScalar { text: String, reason: String },

    /// An expression refers to a variable index outside `1..=m`.
    #[error("variable x{index} out of range (expression has {max} variables)")]
    UnknownVariable { index: usize, max: usize },

    /// A documented operation precondition does not hold.
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
}
