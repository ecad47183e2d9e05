//! Library half of the `revmap` CLI: config parsing, experiment
//! orchestration, verification suites, and CSV/SVG emission. The binary
//! in `main.rs` is a thin clap wrapper over these.

pub mod config;
pub mod csvio;
pub mod embed_cmd;
pub mod fetch;
pub mod plot;
pub mod runner;
pub mod verify;

/// Process exit codes shared by all subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    VerificationFailure = 1,
    UsageOrConfig = 2,
    Io = 3,
}

/// Errors carrying their exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, bad config file contents, missing config.
    Config(String),
    /// Filesystem or network trouble.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::UsageOrConfig,
            CliError::Io(_) => ExitCode::Io,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Io(m) => m,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message())
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Environment variable overriding the data cache directory.
pub const DATA_DIR_ENV: &str = "REVMAP_DATA_DIR";

/// Resolve the data directory: explicit flag, then env var, then `data`.
pub fn resolve_data_dir(flag: Option<&str>) -> std::path::PathBuf {
    if let Some(d) = flag {
        return d.into();
    }
    if let Ok(d) = std::env::var(DATA_DIR_ENV) {
        if !d.is_empty() {
            return d.into();
        }
    }
    "data".into()
}
