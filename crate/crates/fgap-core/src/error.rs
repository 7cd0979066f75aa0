//! Crate-wide error type.

use thiserror::Error;

#[derive(Error, Debug, Clone)]
pub enum Error {
    /// The leading coefficient of a would-be modulus vanishes, or the
    /// polynomial is not square-free.
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),

    /// An elimination pivot (or an inverse) is a zero divisor modulo the
    /// branch condition.  The offending factor is a proper divisor of the
    /// modulus; the caller may split the branch along it and retry.
    #[error("modulus not prime over this branch; offending factor: {factor}")]
    SplitModulus { factor: String },

    #[error("division by zero in exact arithmetic")]
    DivisionByZero,

    #[error("degenerate singular configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("operation not applicable: {0}")]
    NotApplicable(String),

    #[error("point is not a singular point of the equation: {0}")]
    NonsingularPoint(String),

    /// The integrand of the recursion operator has a nonzero residue at a
    /// finite pole, so its antiderivative would contain a logarithm.
    #[error("logarithmic antiderivative: nonzero residue at {location}")]
    LogarithmicAntiderivative { location: String },

    /// No polynomial solution of the product equation exists up to the genus
    /// upper bound: the equation is not finite-gap.
    #[error("no polynomial solution up to genus {upper_bound}: not finite-gap")]
    NotFiniteGap { upper_bound: usize },

    #[error("solution space has dimension {dimension}, expected a single point")]
    NonUniqueSolution { dimension: usize },

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("cannot serialize exactly: {0}")]
    SerializeUnsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported relation: {0}")]
    UnsupportedRelation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
