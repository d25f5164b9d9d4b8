use thiserror::Error;

/// Errors produced by the library. Each variant maps onto one CLI exit code
/// through [`Error::exit_code`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("row {row} has (near) zero norm")]
    DegenerateRow { row: usize },
    #[error("subset {subset:?} is numerically singular")]
    SingularSubset { subset: Vec<usize> },
    #[error("vectors are linearly dependent (vector {index})")]
    DependentSet { index: usize },
    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("moment of order {gamma} diverges (+inf)")]
    MomentDivergent { gamma: f64 },
    #[error("insufficient tail data: {0}")]
    InsufficientTailData(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_)
            | Error::DegenerateRow { .. }
            | Error::Parse(_)
            | Error::Io(_)
            | Error::Unsupported(_)
            | Error::DependentSet { .. } => 1,
            Error::NoConvergence { .. }
            | Error::BudgetExceeded(_)
            | Error::SingularSubset { .. }
            | Error::MomentDivergent { .. } => 2,
            Error::InsufficientTailData(_) => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
