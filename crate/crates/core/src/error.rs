//! Crate-wide error type.
//!
//! Every fallible operation returns [`CoreError`] with a module-qualified
//! message so CLI reports can surface the failing contract verbatim.

use thiserror::Error;

/// Errors surfaced by the library. Variants are grouped by module.
#[derive(Error, Debug)]
pub enum CoreError {
    #[error("octonion: inverse of zero")]
    OctonionInverseOfZero,

    #[error("hermitian: matrix not strictly positive (a11 = {a11}, det = {det})")]
    NotStrictlyPositive { a11: f64, det: f64 },

    #[error("hermitian: gram matrix of the strongly positive basis is numerically singular")]
    SingularGram,

    #[error("jets: field is singular at the evaluation point ({0})")]
    SingularPoint(String),

    #[error(
        "jets: derivative evaluation refused in the boundary collar |1 + x2| < {collar}; \
         only values are defined there"
    )]
    JetInCollar { collar: f64 },

    #[error("catalog: {0}")]
    InvalidParameter(String),

    #[error("catalog: parse error at token {index}: {message}")]
    Parse { index: usize, message: String },

    #[error("geometry: base point must satisfy |a| <= 1 - {margin}, got |a| = {norm}")]
    BasePointMargin { norm: f64, margin: f64 },

    #[error("geometry: point must lie in the closed unit ball, got |x| = {0}")]
    OutsideBall(f64),

    #[error("geometry: translation parameter must lie on the boundary surface (defect = {0})")]
    NotBoundaryParameter(f64),

    #[error("geometry: dilation factor must be positive, got {0}")]
    NonPositiveDilation(f64),

    #[error("geometry: group parameter t must be imaginary, got re(t) = {0}")]
    RealHeisenbergPart(f64),

    #[error("quadrature: integrand returned a non-finite value at {0}")]
    NonFiniteSample(String),

    #[error("quadrature: {0}")]
    BadQuadratureSpec(String),

    #[error("operators: second argument of the pairing must be flagged closed")]
    NotClosed,

    #[error("operators: {0}")]
    Contract(String),

    #[error("perron: {0}")]
    Boundary(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
