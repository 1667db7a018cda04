use thiserror::Error;

/// Errors raised anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed text input; `line` is 1-based.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A dense object or statevector would exceed the configured size limit.
    #[error("size guard: {what} needs {requested} qubits, limit is {limit}")]
    SizeGuard {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("operator is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("imaginary residue {residue:.3e} after Jordan-Wigner mapping; operator is not Hermitian")]
    ImaginaryResidue { residue: f64 },

    /// Decoded phase lies in the band where the gap sign cannot be resolved.
    #[error(
        "phase {delta_phi:.6} lies in the ambiguous band (1/4, 3/4); reduce the evolution time t"
    )]
    AmbiguousPhase { delta_phi: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidInput(message.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
