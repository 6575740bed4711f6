use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration or data file failed to parse.
    #[error("{path}:{line}: {message}")]
    Config {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// Parsed data breaks a structural invariant.
    #[error("invalid {subject}: {message}")]
    Validation { subject: String, message: String },

    #[error("unknown {kind} `{id}`")]
    Lookup { kind: &'static str, id: String },

    #[error("category `{0}` has no ordered scale")]
    NotOrdered(String),

    /// An operator or relation does not apply to the given case. Callers
    /// skip the case and log the reason.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// A required upstream artifact is missing.
    #[error("missing upstream input: {0}")]
    Upstream(String),

    /// A replay cache lookup missed while network access was disabled.
    #[error("replay cache miss for case {case_id}")]
    CacheMiss { case_id: String },

    /// An external adapter (model, classifier, embedder) failed.
    #[error("adapter failure: {0}")]
    Adapter(String),

    #[error("corpus {path}:{line}: {message}")]
    Corpus {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn validation(subject: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            subject: subject.into(),
            message: message.into(),
        }
    }

    pub(crate) fn not_applicable(reason: impl Into<String>) -> Self {
        Error::NotApplicable(reason.into())
    }

    pub fn is_not_applicable(&self) -> bool {
        matches!(self, Error::NotApplicable(_))
    }

    /// Process exit code for the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Validation { .. } | Error::Lookup { .. } => 2,
            Error::NotOrdered(_) | Error::NotApplicable(_) => 2,
            Error::Upstream(_) | Error::Corpus { .. } => 3,
            Error::CacheMiss { .. } | Error::Adapter(_) => 4,
            Error::Io(_) | Error::Json(_) | Error::Csv(_) => 3,
        }
    }
}

/// Line number (1-based) of a byte offset in `source`.
pub(crate) fn line_of(source: &str, offset: usize) -> usize {
    source[..offset.min(source.len())].matches('\n').count() + 1
}
