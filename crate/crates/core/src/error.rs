use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("length error: {0}")]
    Length(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("format error at row {row}: {message}")]
    Format { row: usize, message: String },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("degrees of freedom error: {0}")]
    Dof(String),
    #[error("size error: {0}")]
    Size(String),
    #[error("rank deficient design, collinear columns: {}", .columns.join(", "))]
    Rank { columns: Vec<String> },
    #[error("lookup error: series `{0}` not found")]
    Lookup(String),
    #[error("estimation error: {message}")]
    Estimation {
        message: String,
        /// Best objective/parameter point reached before giving up, if any.
        best: Option<Vec<f64>>,
    },
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn estimation(message: impl Into<String>) -> Self {
        Error::Estimation {
            message: message.into(),
            best: None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
