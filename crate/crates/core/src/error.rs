use thiserror::Error;

/// Errors raised by the exact constructions and checks.
///
/// Mathematical "no" answers (a nonzero CYBE residual, a failed isotropy
/// check) are ordinary return values; these variants are reserved for
/// invalid input and for broken internal invariants.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid shift data: {0}")]
    InvalidShift(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("degenerate basis: Gram matrix is singular")]
    DegenerateBasis,
    #[error("singular matrix")]
    Singular,
    #[error("pole of r: x0 = y0")]
    Pole,
    #[error("cobracket not polynomial: numerator not divisible by (x2 - x1)")]
    CobracketNotPolynomial,
    #[error("window too narrow: {0}")]
    WindowTooNarrow(String),
    #[error("transversality violated: {0}")]
    TransversalityViolated(String),
    #[error("order not inside O_(c,d): {0}")]
    NotInsideO(String),
    #[error("geometric output not quasi-trigonometric: {0}")]
    NotQuasiTrigonometric(String),
    #[error("no admissible r0: {0}")]
    NoAdmissibleR0(String),
    #[error("invalid Belavin-Drinfeld data: {0}")]
    InvalidBdData(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
