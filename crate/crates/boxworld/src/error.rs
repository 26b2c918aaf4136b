use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index {index} out of range for n={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("invalid local-operation tag {0} (expected 0..=3)")]
    InvalidTag(u8),
    #[error("enumeration for n={0} refused: exhaustive scan is only budgeted for n <= 3, use the ILP sampler")]
    EnumerationBudget(usize),
    #[error("inconsistent linear system: no solution")]
    InconsistentSystem,
    #[error("linear program infeasible")]
    Infeasible,
    #[error("linear program unbounded")]
    Unbounded,
    #[error("vertex enumeration budget exceeded after {rays} rays ({inserted} of {total} constraints inserted)")]
    VertexBudget { rays: usize, inserted: usize, total: usize },
    #[error("guard exceeded: {0}")]
    Guard(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("catalog format error: {0}")]
    Catalog(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
