use nalgebra::DVector;
use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A design column has (numerically) zero Euclidean norm and cannot be
    /// standardized.
    #[error("design column {column} has near-zero norm and cannot be standardized")]
    ZeroColumn { column: usize },

    #[error("dimension mismatch for {what}: expected {expected}, got {actual}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    /// Coordinate descent hit its iteration cap before the largest coordinate
    /// update dropped below tolerance. The last iterate is kept so callers
    /// can decide whether it is still usable.
    #[error("coordinate descent did not converge after {iterations} sweeps")]
    NoConvergence {
        iterations: usize,
        last: Box<DVector<f64>>,
    },

    /// The largest penalty `||X^T Y||_inf` is numerically zero, so no
    /// geometric grid can be built.
    #[error("degenerate tuning grid: ||X^T Y||_inf is below 1e-12")]
    DegenerateGrid,

    #[error("support path is empty")]
    EmptyPath,

    #[error("cross-validation fold would hold {rows} rows; need at least 1")]
    FoldTooSmall { rows: usize },

    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("could not parse {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
