use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("algebra is not commutative")]
    NotCommutative,
    #[error("non-commuting set: {0}")]
    NonCommutingSet(String),
    #[error("poset closure violated: {0}")]
    ClosureViolation(String),
    #[error("size limit exceeded: {what} (limit {limit})")]
    SizeLimit { what: String, limit: usize },
    #[error("subobject is not dense")]
    NotDense,
    #[error("presheaf is not a sheaf")]
    NotSheaf,
    #[error("stage at context {0} is not a filter")]
    NotFilter(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn size_limit(what: impl Into<String>, limit: usize) -> Error {
    Error::SizeLimit { what: what.into(), limit }
}
