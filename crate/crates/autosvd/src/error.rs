use std::fmt;
use std::io;
use std::path::PathBuf;

/// Errors surfaced by the library.
#[derive(Debug)]
pub enum Error {
    /// File could not be opened, read or written.
    Io { path: PathBuf, source: io::Error },
    /// A line in an input file did not match the expected layout.
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    /// A ratings file contained no usable triples.
    NoRatings { path: PathBuf },
    /// Invalid configuration or argument combination.
    Config(String),
    /// Incompatible dimensions between models, datasets or feature matrices.
    Shape(String),
    /// A non-finite loss or parameter was produced during training.
    Diverged(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Io { path, source } => write!(f, "{}: {}", path.display(), source),
            Error::Parse { path, line, reason } => {
                write!(f, "{}:{}: {}", path.display(), line, reason)
            }
            Error::NoRatings { path } => write!(f, "{}: no ratings", path.display()),
            Error::Config(msg) => write!(f, "config error: {}", msg),
            Error::Shape(msg) => write!(f, "shape mismatch: {}", msg),
            Error::Diverged(msg) => write!(f, "training diverged: {}", msg),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 1 usage/config, 2 data, 3 divergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Shape(_) => 1,
            Error::Io { .. } | Error::Parse { .. } | Error::NoRatings { .. } => 2,
            Error::Diverged(_) => 3,
        }
    }

    /// Prefix the message of a message-carrying variant; the path-bearing
    /// variants already say where they came from.
    pub fn with_context(self, ctx: &str) -> Self {
        match self {
            Error::Config(m) => Error::Config(format!("{ctx}: {m}")),
            Error::Shape(m) => Error::Shape(format!("{ctx}: {m}")),
            Error::Diverged(m) => Error::Diverged(format!("{ctx}: {m}")),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
