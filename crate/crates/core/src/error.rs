use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed deal: {0}")]
    MalformedDeal(String),

    #[error("inconsistent hand: {0}")]
    InconsistentHand(String),

    #[error("illegal action {action} in phase {phase} for player {player}")]
    IllegalAction {
        phase: u8,
        player: u8,
        action: String,
    },

    #[error("game is already over")]
    Terminal,

    #[error("game is not over yet")]
    NotTerminal,

    #[error("selector for player {player} chose illegal action {action}; state: {snapshot}")]
    SelectorFault {
        player: u8,
        action: String,
        snapshot: String,
    },

    #[error("no legal action in mask")]
    EmptyMask,

    #[error("feature out of range: {0}")]
    FeatureRange(String),

    #[error("invalid payoff matrix: {0}")]
    Matrix(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}:{line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("epoch {epoch}: {source}")]
    Epoch {
        epoch: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
