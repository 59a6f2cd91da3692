use nalgebra::DMatrix;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller supplied something that violates an operation's preconditions.
    #[error("invalid input: {0}")]
    Input(String),

    /// The input is well formed but carries no usable geometry (e.g. every
    /// point sits on the chosen origin).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A local search produced a non-finite objective. `last_b` is the last
    /// iterate whose objective was finite.
    #[error("search failed: {message}")]
    Search {
        message: String,
        last_b: Box<DMatrix<f64>>,
        last_value: f64,
    },

    /// The extreme-point feasibility solver did not terminate for a point.
    #[error("feasibility solver failed for point {point}: {message}")]
    Solver { point: usize, message: String },

    #[error("failed to load data: {0}")]
    Load(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
