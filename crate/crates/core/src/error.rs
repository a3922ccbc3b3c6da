use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not a valid stabilizer lattice: {0}")]
    NotStabilizerLattice(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("lattice is not self-dual (code dimension {0})")]
    NotSelfDual(u64),

    #[error("dimension limit exceeded: {what} = {value}, limit {limit}")]
    DimensionLimit {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("rotation angle is a multiple of 2π: coefficient reduces to the delta-function limit π·δ²(γ)")]
    DeltaFunctionLimit,

    #[error("numerical routine did not converge: {0}")]
    NoConvergence(String),

    #[error("bisection bracket does not contain the target: {0}")]
    Bracket(String),

    #[error("grid too small: {0}")]
    Grid(String),

    #[error("unsupported code for this operation: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
