use thiserror::Error;

/// Errors raised by the library.
///
/// Variants are grouped so the CLI can map them onto exit codes: configuration
/// and input problems are [`Error::is_input_error`], theorem or lemma
/// violations are [`Error::Assertion`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("desk-scale limit exceeded: {0}")]
    Limit(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("zero polynomial has no {0}")]
    ZeroPolynomial(&'static str),

    #[error("valuation of zero is +infinity")]
    ZeroValuation,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("pole at {0}")]
    Pole(String),

    #[error("search space exhausted: {0} (extend the base field)")]
    Exhausted(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("assertion failed: {0}")]
    Assertion(String),
}

impl Error {
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Assertion(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
