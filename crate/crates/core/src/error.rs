use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure mode of the crate.
///
/// Variants are grouped by [`ErrorKind`] so that the command-line driver can
/// map them onto exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("alignment failed: {0}")]
    Alignment(String),
    #[error("duplicate series id `{0}`")]
    DuplicateId(String),
    #[error("series `{id}` has a missing value at {date}")]
    Gap { id: String, date: String },
    #[error("invalid climatology baseline: {0}")]
    Baseline(String),
    #[error("insufficient coverage: {0}")]
    Coverage(String),
    #[error("frequency mismatch: {0}")]
    Frequency(String),
    #[error("degenerate series: {0}")]
    DegenerateSeries(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("inconsistent inputs: {0}")]
    Consistency(String),
    #[error("singular regressor design: {0}")]
    SingularDesign(String),
    #[error("sample too small: {0}")]
    SampleSize(String),
    #[error("degenerate inference: {0}")]
    DegenerateInference(String),
    #[error("network has no significant edges")]
    EmptyNetwork,
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },
    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{stage} stage failed{}: {source}", series.as_ref().map(|s| format!(" for `{s}`")).unwrap_or_default())]
    Stage {
        stage: &'static str,
        series: Option<String>,
        #[source]
        source: Box<Error>,
    },
}

/// Coarse classification used for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Numerical,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) => ErrorKind::Config,
            Error::Alignment(_)
            | Error::DuplicateId(_)
            | Error::Gap { .. }
            | Error::Baseline(_)
            | Error::Coverage(_)
            | Error::Frequency(_)
            | Error::Domain(_)
            | Error::Consistency(_)
            | Error::Parse { .. }
            | Error::Io { .. } => ErrorKind::Data,
            Error::DegenerateSeries(_)
            | Error::SingularDesign(_)
            | Error::SampleSize(_)
            | Error::DegenerateInference(_)
            | Error::EmptyNetwork
            | Error::Convergence { .. } => ErrorKind::Numerical,
            Error::Stage { source, .. } => source.kind(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at_stage(self, stage: &'static str, series: Option<&str>) -> Self {
        Error::Stage {
            stage,
            series: series.map(str::to_owned),
            source: Box::new(self),
        }
    }

    /// The innermost error, with any stage wrappers removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}
