use thiserror::Error;

/// Library-wide error type.
///
/// `Domain` covers invalid inputs (parameters outside their admissible
/// range, degenerate configurations); `Numeric` covers runtime numerical
/// failures (non-convergent eigensolves, quadrature mass deficits,
/// derivative estimates that refuse to settle).
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numeric error: {0}")]
    Numeric(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
