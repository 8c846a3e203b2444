use thiserror::Error;

/// Errors produced by the channel-model pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("tissue `{tissue}`: field `{field}`: {msg}")]
    TissueParse {
        tissue: String,
        field: String,
        msg: String,
    },

    #[error("invalid scenario at `{path}`: {msg}")]
    Validation { path: String, msg: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("solver did not converge after {iterations} iterations (last relative residual {last:.3e})")]
    NonConvergence {
        iterations: usize,
        last: f64,
        history: Vec<f64>,
    },

    #[error("extraction error: {0}")]
    Extraction(String),

    #[error("singular circuit: {0}")]
    Singular(String),

    #[error("unknown tissue `{0}`")]
    UnknownTissue(String),

    #[error("at f = {freq} Hz: {source}")]
    AtFrequency {
        freq: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("{context}: {msg}")]
    Parse { context: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            msg: msg.into(),
        }
    }
}
