use std::fmt;

/// Failures of a subcommand, each with its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// The claim was not met at the configured tolerance.
    Comparison(String),
    /// Unreadable or inconsistent configuration.
    Config(String),
    /// A precondition of the requested computation does not hold.
    Precondition(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Comparison(_) => 1,
            Self::Config(_) => 2,
            Self::Precondition(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Comparison(m) => write!(f, "comparison failed: {m}"),
            Self::Config(m) => write!(f, "config error: {m}"),
            Self::Precondition(m) => write!(f, "precondition failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<tracelab::Error> for CliError {
    fn from(e: tracelab::Error) -> Self {
        use tracelab::Error as E;
        match e {
            E::Construction(_) | E::Parse(_) | E::Json(_) => Self::Config(e.to_string()),
            _ => Self::Precondition(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Precondition(format!("i/o: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Precondition(format!("csv: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Precondition(format!("json: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
