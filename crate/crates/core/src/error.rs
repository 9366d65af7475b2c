use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A basis change was requested to a basis that is not reachable from here.
    #[error("invalid basis target: {0}")]
    InvalidTarget(String),

    /// The operation is not defined for the state as it currently stands.
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    /// A grid sampling inequality does not hold; the message names it.
    #[error("sampling criterion violated: {0}")]
    Sampling(String),

    #[error("no fringes: {0}")]
    NoFringes(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("scenario `{name}`: {source}")]
    Scenario {
        name: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn in_scenario(self, name: &str) -> Self {
        Error::Scenario {
            name: name.to_string(),
            source: Box::new(self),
        }
    }
}
