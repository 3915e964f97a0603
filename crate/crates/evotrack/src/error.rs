use std::path::PathBuf;
use thiserror::Error;

/// Errors produced by any stage of the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A malformed row in an input file, with its 1-based data row number.
    #[error("row {row}, field `{field}`: {message}")]
    MalformedRow {
        row: usize,
        field: &'static str,
        message: String,
    },

    /// A record timestamped before the configured analysis origin.
    #[error("record {index} (timestamp {timestamp}) precedes the analysis origin {origin}")]
    RecordBeforeOrigin {
        index: usize,
        timestamp: i64,
        origin: i64,
    },

    /// A parameter outside its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Inputs that disagree on slot index or clique size k.
    #[error("mismatched inputs: {0}")]
    Mismatch(String),

    /// A stage was invoked without the artifact it consumes.
    #[error("missing required file {}", .0.display())]
    MissingArtifact(PathBuf),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    /// Wraps an error with the name of the pipeline stage that raised it.
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
