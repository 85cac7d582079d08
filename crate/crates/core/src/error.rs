use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what}: size {n} exceeds cap {cap}")]
    CapExceeded { what: &'static str, n: usize, cap: usize },

    #[error("memo cache is full ({cap} entries); refusing to evict")]
    CacheFull { cap: usize },

    #[error("evaluation budget of {budget} utility calls exhausted")]
    BudgetExhausted { budget: usize },

    #[error("utility returned non-finite value {value} at mask {mask}")]
    NonFinite { mask: String, value: f64 },

    #[error("curvature undefined: singleton gain of point {index} is {gain}")]
    CurvatureUndefined { index: usize, gain: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("utility evaluation failed at prefix k = {k}: {source}")]
    AtPrefix { k: usize, source: Box<Error> },

    #[error("run {run}, method {method}: {source}")]
    InRun { run: usize, method: String, source: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Process exit code: 2 invalid config, 3 resource cap, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::Io(_) | Error::Json(_) | Error::Csv(_) => 2,
            Error::CapExceeded { .. } | Error::CacheFull { .. } | Error::BudgetExhausted { .. } => 3,
            Error::NonFinite { .. } | Error::CurvatureUndefined { .. } | Error::Numerical(_) => 4,
            Error::AtPrefix { source, .. } | Error::InRun { source, .. } => source.exit_code(),
        }
    }

    /// Strips `AtPrefix`/`InRun` context.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtPrefix { source, .. } | Error::InRun { source, .. } => source.root(),
            other => other,
        }
    }
}
