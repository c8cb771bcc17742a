use thiserror::Error;

/// Errors raised by the library. Every variant carries enough context to
/// reproduce the offending input.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported weight {weight}: supported weights are 12, 16, 18, 20, 22, 26 (one-dimensional cusp spaces)")]
    UnsupportedWeight { weight: u32 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{a} and {b} are not coprime")]
    NotCoprime { a: i64, b: i64 },

    #[error("{0} is not an odd prime")]
    NotOddPrime(i64),

    #[error("gamma function pole at z = {0}")]
    GammaPole(i64),

    #[error("shift s = {s_re}+{s_im}i is outside the supported strip |Re s| <= {limit}")]
    OutsideStrip { s_re: f64, s_im: f64, limit: f64 },

    #[error("truncation did not settle: achieved tail bound {achieved:e} with N = {terms}")]
    TruncationUnsettled { achieved: f64, terms: usize },

    #[error("principal character is not primitive")]
    NotPrimitive,

    #[error("contour integral diverges at abscissa {abscissa}: decay exponent {exponent} is not below -1")]
    NonconvergentAbscissa { abscissa: f64, exponent: f64 },

    #[error("tolerance {tol:e} unachievable: {reason} (tail estimate {tail:e}, quadrature error {quad:e})")]
    ToleranceUnachievable { tol: f64, tail: f64, quad: f64, reason: String },

    #[error("modulus {q} too large for the character-sum path (cost ~ {cost} additive evaluations)")]
    ModulusTooLarge { q: u64, cost: u64 },

    #[error("io error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
