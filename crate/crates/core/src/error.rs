use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid support: {0}")]
    InvalidSupport(String),

    #[error("dataset would be empty (L = n = 0)")]
    EmptyDataset,

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("labeled data has no samples with label {0:+}")]
    MissingClass(i8),

    #[error("screening keeps {retained} coordinates but k = {k}")]
    ScreeningTooSmall { retained: usize, k: usize },

    #[error("eigen-solver did not converge after {iterations} operator applications (residual {residual:.3e})")]
    Convergence {
        iterations: usize,
        residual: f64,
        last: Box<Vec<f64>>,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("exact computation infeasible: {0}")]
    ExactInfeasible(String),

    #[error("bound not applicable: {0}")]
    BoundInapplicable(String),

    #[error("outside domain: {0}")]
    Domain(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown configuration keys: {}", .0.join(", "))]
    UnknownKeys(Vec<String>),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
