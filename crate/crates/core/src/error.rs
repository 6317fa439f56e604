use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library reports. [`Error::kind`] gives a stable
/// machine-readable tag used by the command line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("invalid machine: {0}")]
    InvalidMachine(String),

    #[error("invalid machine spec `{spec}`: {reason}")]
    InvalidSpec { spec: String, reason: String },

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("machine is nondeterministic at state `{0}`; supply a chooser")]
    Nondeterministic(String),

    #[error("machine halted after {after} steps")]
    Halted {
        after: u64,
        /// Visit fractions gathered before the halt, when any were collected.
        partial: Vec<(String, f64)>,
    },

    #[error("stationary distribution is not unique: closed classes {0:?}")]
    Ambiguous(Vec<Vec<String>>),

    #[error("power iteration did not converge (residual {0:e})")]
    NoConvergence(f64),

    #[error("no wheel with at most {max_states} states reaches epsilon {requested:e}; best achievable is {best:e}")]
    Infeasible {
        requested: f64,
        best: f64,
        max_states: usize,
    },

    #[error("search budget of {0} exceeded")]
    Budget(usize),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("scale error: {0}")]
    Scale(String),

    #[error("fluent error: {0}")]
    Fluent(String),

    #[error("unknown word `{0}`")]
    UnknownWord(String),

    #[error("unknown tense `{0}`")]
    UnknownTense(String),

    #[error("contradictory context: no sense of `{0}` survives")]
    Contradiction(String),

    #[error("invalid distribution: {0}")]
    Distribution(String),

    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnknownState(_) => "unknown-state",
            Error::UnknownSymbol(_) => "unknown-symbol",
            Error::InvalidMachine(_) => "invalid-machine",
            Error::InvalidSpec { .. } => "invalid-spec",
            Error::Constraint(_) => "constraint",
            Error::Nondeterministic(_) => "nondeterministic",
            Error::Halted { .. } => "halted",
            Error::Ambiguous(_) => "ambiguous",
            Error::NoConvergence(_) => "no-convergence",
            Error::Infeasible { .. } => "infeasible",
            Error::Budget(_) => "budget",
            Error::Unsupported(_) => "unsupported",
            Error::Scale(_) => "scale",
            Error::Fluent(_) => "fluent",
            Error::UnknownWord(_) => "unknown-word",
            Error::UnknownTense(_) => "unknown-tense",
            Error::Contradiction(_) => "contradiction",
            Error::Distribution(_) => "distribution",
            Error::Invalid(_) => "invalid",
            Error::Json(_) => "json",
            Error::Io(_) => "io",
        }
    }
}
