use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("factorization limit: residue {residue} has no factor up to {bound} and cannot be classified")]
    FactorizationLimit { residue: String, bound: u64 },

    /// The exact spectrum needs alpha^2 to be rational.
    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),

    #[error("singular parameter: {0}")]
    SingularParameter(String),

    #[error("alpha is not real: Y^2 = {y_squared} < n = {n}")]
    AlphaNotReal { y_squared: String, n: u64 },

    /// Fewer than two distinct levels; such a span revives at every time.
    #[error("single level: fewer than two distinct energies")]
    SingleLevel,

    #[error("usage error: {0}")]
    Usage(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
