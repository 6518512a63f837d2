use thiserror::Error;

/// Failure modes shared across the crate. Points are stored as `(re, im)` in
/// double precision regardless of the working scalar.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at byte {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("denominator is identically zero at byte {pos}")]
    ZeroDenominator { pos: usize },
    #[error("{what} at z = {}{:+}i", z.0, z.1)]
    Domain { z: (f64, f64), what: &'static str },
    #[error("point at distance {distance} lies outside trust radius {radius}")]
    OutsideTrustRadius { distance: f64, radius: f64 },
    #[error("degree {degree} exceeds the configured maximum {max}")]
    DegreeTooLarge { degree: usize, max: usize },
    #[error("continuation failed near z = {}{:+}i: {reason}", z.0, z.1)]
    ContinuationFailure { z: (f64, f64), reason: &'static str },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("winding number mismatch in cell r=[{r0}, {r1}], theta=[{t0}, {t1}]: {detail}")]
    WindingMismatch { r0: f64, r1: f64, t0: f64, t1: f64, detail: String },
    #[error("duplicate points in sequence at index {0} and {1}")]
    DuplicatePoints(usize, usize),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("threshold {0} underflows the working precision")]
    Underflow(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
