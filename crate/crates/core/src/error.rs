use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A value outside its documented domain (NaN, nonpositive scale, ...).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Operands whose dimensions do not conform.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// NaN handed to a scalar kernel.
    #[error("domain error: {0}")]
    Domain(String),

    /// Cholesky hit a nonpositive pivot. `row` is the global matrix row,
    /// which is what a nugget workflow needs to report.
    #[error("matrix not positive definite at global row {row} (pivot {pivot:e})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    /// A task graph that cannot be scheduled.
    #[error("task graph error: {0}")]
    Graph(String),
}

pub type Result<T> = std::result::Result<T, Error>;
