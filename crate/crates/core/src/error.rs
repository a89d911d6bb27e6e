use thiserror::Error;

pub type Result<T> = std::result::Result<T, HrvError>;

#[derive(Debug, Error)]
pub enum HrvError {
    /// Invalid parameters in a law, generator spec or run configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Misuse of an operation: mismatched lengths, k out of range, unknown names.
    #[error("usage error: {0}")]
    Usage(String),

    /// Input outside the domain of a transform or estimator.
    #[error("domain error: {0}")]
    Domain(String),

    /// Pickandsish denominator vanished: the two quantile levels coincide.
    #[error("degenerate quantiles: {0}")]
    DegenerateQuantile(String),

    /// Data without spread where a scale is required (e.g. KDE bandwidth).
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<HrvError>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl HrvError {
    pub fn context(self, context: impl Into<String>) -> Self {
        HrvError::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error once all context layers are stripped.
    pub fn root(&self) -> &HrvError {
        match self {
            HrvError::Context { source, .. } => source.root(),
            other => other,
        }
    }

    /// Process exit code: 1 for usage/configuration problems, 2 for data and domain failures.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            HrvError::Config(_) | HrvError::Usage(_) => 1,
            _ => 2,
        }
    }
}

pub(crate) trait ResultExt<T> {
    fn context(self, context: impl Into<String>) -> Result<T>;
}

impl<T> ResultExt<T> for Result<T> {
    fn context(self, context: impl Into<String>) -> Result<T> {
        self.map_err(|e| e.context(context))
    }
}
