use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate cell: {0}")]
    DegenerateCell(String),
    #[error("unsupported combination: {0}")]
    Unsupported(String),
    #[error("dofs are not unisolvent for {0}")]
    UnisolvenceFailure(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("solver failed: {0}")]
    Solver(String),
}
