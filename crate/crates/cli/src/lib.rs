//! Library side of the `qpde` command-line tool.

pub mod commands;
pub mod manifest;

use qpde::Error;

/// Failure classes, each with its own process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad manifest, missing file, malformed integrals or state specs.
    #[error("{0}")]
    Input(String),
    /// A numerical guard tripped (size limit, unitarity, Hermiticity).
    #[error("{0}")]
    Numerical(String),
    /// A phase reading could not be decoded unambiguously.
    #[error("{0}")]
    Ambiguous(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Ambiguous(_) => 4,
        }
    }

    /// Prefixes the message with `ctx` (typically a file path).
    pub fn context(self, ctx: &str) -> Self {
        match self {
            CliError::Input(m) => CliError::Input(format!("{ctx}: {m}")),
            CliError::Numerical(m) => CliError::Numerical(format!("{ctx}: {m}")),
            CliError::Ambiguous(m) => CliError::Ambiguous(format!("{ctx}: {m}")),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Parse { .. } | Error::InvalidInput(_) => CliError::Input(msg),
            Error::AmbiguousPhase { .. } => CliError::Ambiguous(msg),
            Error::SizeGuard { .. } | Error::NotUnitary { .. } | Error::ImaginaryResidue { .. } | Error::Numerical(_) => {
                CliError::Numerical(msg)
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}
