use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: bad lengths, unknown labels, out-of-range parameters.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The state has (numerically) zero norm and cannot be normalized.
    #[error("degenerate state: squared norm {0:e} is too small to normalize")]
    DegenerateState(f64),

    /// A conditioning outcome whose probability is effectively zero.
    #[error("impossible outcome: {count} photons in mode `{mode}` has probability {probability:e}")]
    ImpossibleOutcome {
        mode: String,
        count: u32,
        probability: f64,
    },

    /// A mode expected to factor out of the state is correlated with the rest.
    #[error("mode set {modes:?} is entangled with the rest of the state (purity {purity})")]
    EntangledMode { modes: Vec<String>, purity: f64 },

    #[error("circuit `{circuit}` is invalid: {}", .diagnostics.join("; "))]
    InvalidCircuit {
        circuit: String,
        diagnostics: Vec<String>,
    },

    /// Failure while executing a circuit step.
    #[error("step {step} ({kind}): {source}")]
    Step {
        step: usize,
        kind: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    /// Strip step context and return the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::Step { source, .. } => source.root(),
            other => other,
        }
    }
}
