use thiserror::Error;

/// Errors raised anywhere in the synthesis pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("matrix fixture parse error at line {line}: {msg}")]
    Fixture { line: usize, msg: String },

    #[error("gate error: {0}")]
    Gate(String),

    #[error("invalid placement: {0}")]
    Placement(String),

    #[error("unknown token {token:?} at offset {offset}")]
    UnknownToken { token: String, offset: usize },

    #[error("malformed genome: {0}")]
    Grammar(String),

    #[error("structural error: {0}")]
    Structure(String),

    #[error("encoding error: {0}")]
    Encoding(String),

    #[error("generation error: {0}")]
    Generation(String),

    #[error("target error: {0}")]
    Target(String),

    #[error("fitness error: {0}")]
    Fitness(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("selection error: {0}")]
    Selection(String),

    #[error("unknown benchmark {0:?}")]
    UnknownBenchmark(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
