use std::fmt;

use thiserror::Error;

/// Failure of a CLI run, grouped by exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(ConfigError),
    #[error(transparent)]
    Numeric(#[from] photon_core::Error),
    /// An in-run consistency check did not hold.
    #[error("check failed: {0}")]
    Check(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for configuration and file problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numeric(_) | CliError::Check(_) => 3,
        }
    }

    pub fn class(&self) -> &'static str {
        use photon_core::Error as E;
        match self {
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
            CliError::Check(_) => "check",
            CliError::Numeric(e) => match e {
                E::Shape(_) => "shape",
                E::Domain(_) => "domain",
                E::State { .. } => "state",
                E::Conditioning { .. } => "conditioning",
                E::Convergence(_) => "convergence",
            },
        }
    }

    /// Single-line form for stderr: `error class=<class>: <message>`.
    pub fn machine_line(&self) -> String {
        let msg = self.to_string().replace('\n', " ");
        format!("error class={}: {msg}", self.class())
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

/// Problem in a scenario file, located by line and key where known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl ConfigError {
    pub fn new(line: Option<usize>, key: Option<&str>, message: impl Into<String>) -> Self {
        Self { line, key: key.map(str::to_owned), message: message.into() }
    }

    pub fn at(line: usize, key: &str, message: impl Into<String>) -> Self {
        Self::new(Some(line), Some(key), message)
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if let Some(key) = &self.key {
            write!(f, "key '{key}': ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for ConfigError {}
