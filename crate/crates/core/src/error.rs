use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input: unknown names, bad classes, broken
    /// preconditions.
    #[error("input error: {0}")]
    Input(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Exact synchronizing-word search refused because of the state bound.
    #[error("automaton has {states} states, above the exact-search bound of {bound}; use the greedy heuristic")]
    TooManyStates { states: usize, bound: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{event} is not physically possible: {reason}")]
    PhysicallyImpossible { event: String, reason: String },

    #[error("{event} is disabled by supervisor {supervisor}")]
    ControlViolation { event: String, supervisor: String },

    #[error("supervisor {supervisor} has no transition for observed event {event} at its estimate {state}")]
    EstimateLost {
        event: String,
        supervisor: String,
        state: String,
    },

    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
