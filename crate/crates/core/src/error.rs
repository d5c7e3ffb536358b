use std::fmt;
use std::path::PathBuf;

/// A rejected input, always tied to a location.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemaError {
    /// Source file, when the input came from one.
    pub file: Option<String>,
    /// Row (`row 4`), line, or JSON path (`hypotheses[2][7]`).
    pub location: String,
    pub field: String,
    pub message: String,
}

impl SchemaError {
    pub fn new(
        location: impl Into<String>,
        field: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        SchemaError {
            file: None,
            location: location.into(),
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn in_file(mut self, file: impl Into<String>) -> Self {
        self.file = Some(file.into());
        self
    }
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(file) = &self.file {
            write!(f, "{file}: ")?;
        }
        write!(f, "{}: field `{}`: {}", self.location, self.field, self.message)
    }
}

impl std::error::Error for SchemaError {}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(#[from] SchemaError),
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn schema(
        location: impl Into<String>,
        field: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        Error::Schema(SchemaError::new(location, field, message))
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 for schema and configuration problems, 1 for
    /// data problems (not-found, degenerate or empty input, I/O).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema(_) | Error::InvalidConfig(_) => 2,
            Error::EmptyInput(_) | Error::NotFound(_) | Error::Degenerate(_) | Error::Io { .. } => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
