use nalgebra::DMatrix;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("symmetric eigensolver did not converge on {}x{} matrix {matrix}", matrix.nrows(), matrix.ncols())]
    EigenNonConvergence { matrix: DMatrix<f64> },

    #[error("matrix must be square with finite entries (got {rows}x{cols})")]
    InvalidMatrix { rows: usize, cols: usize },

    #[error("delta schedule exhausted after {tried} candidates without an acceptable shift")]
    ScheduleExhausted { tried: usize },

    #[error("invalid delta schedule: {0}")]
    InvalidSchedule(String),

    #[error("non-finite objective evaluation at {point:?}")]
    NonFiniteEvaluation { point: Vec<f64> },

    #[error("eigenvalue {min_abs:e} below singularity threshold {threshold:e}")]
    SingularDirection { min_abs: f64, threshold: f64 },

    #[error("Hessian is numerically singular (minsp {min_abs:e} <= {threshold:e})")]
    SingularHessian { min_abs: f64, threshold: f64 },

    #[error("line search hit its floor step {gamma:e} without decreasing the objective")]
    LineSearchFloor { gamma: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid protein chain: {0}")]
    InvalidChain(String),

    #[error("unknown report format `{0}` (expected csv, markdown or jsonlines)")]
    UnknownFormat(String),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
