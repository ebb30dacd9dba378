use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),
    #[error("matrix is rank deficient: numerical rank {rank} < {rows}")]
    RankDeficient { rank: usize, rows: usize },
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("simplex iteration limit of {0} pivots exceeded")]
    IterationLimit(usize),
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("solution violates the equality constraints by {residual:e}")]
    Inaccurate { residual: f64 },
    #[error("weight {value} at index {index} is not strictly positive")]
    NonpositiveWeight { index: usize, value: f64 },
    #[error("invalid counts: {0}")]
    InvalidCounts(String),
    #[error("invalid fraction: {0}")]
    InvalidFraction(String),
    #[error("index set of size {size} exceeds the exact-enumeration cap of {cap}")]
    SetTooLarge { size: usize, cap: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate threshold fit: {0}")]
    DegenerateFit(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Numerical failures as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::RankDeficient { .. }
                | Error::IterationLimit(_)
                | Error::Infeasible
                | Error::Unbounded
                | Error::Inaccurate { .. }
                | Error::DegenerateFit(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
