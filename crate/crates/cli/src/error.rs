use std::fmt;

/// Failure classes, each with its own process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config keys or parameter values.
    Usage(String),
    Io(String),
    /// The oracle disagreed with the phase-space engine.
    Certification(String),
    /// A computation produced something that cannot be reported.
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Certification(_) => 4,
            CliError::Numeric(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Certification(m) => write!(f, "certification failed: {m}"),
            CliError::Numeric(m) => write!(f, "numerical error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<cvpm_core::Error> for CliError {
    fn from(e: cvpm_core::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}
