use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("linear system has no solution")]
    NoSolution,
    #[error("relative weight filtration does not exist: {0}")]
    NotExists(String),
    #[error("not a mixed Hodge structure: {0}")]
    NotMhs(String),
    #[error("no sl2 triple: {0}")]
    NoTriple(String),
    #[error("inconsistent sl2 triple: {0}")]
    InconsistentTriple(String),
    #[error("index mismatch: {0}")]
    IndexMismatch(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("no integral lift of 1 in the top graded piece")]
    NoIntegralLift,
    #[error("no canonical lift: {0}")]
    NoLift(String),
    #[error("monodromy is not quasi-unipotent: {0}")]
    NotQuasiUnipotent(String),
    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),
    #[error("value cannot be instantiated: {0}")]
    NotInstantiable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
