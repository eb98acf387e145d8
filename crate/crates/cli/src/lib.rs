//! Library side of the `lanpower` binary: argument definitions, config
//! parsing, CSV and SVG output, and the three subcommands.

pub mod commands;
pub mod config;
pub mod csv;
pub mod format;
pub mod svg;

use clap::Parser;

/// Failure classes mapped onto process exit codes.
#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CliError {
    /// Bad arguments or configuration; exit code 2.
    #[error("{0}")]
    Usage(String),
    /// Runtime failure; exit code 1.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<lanpower_core::Error> for CliError {
    fn from(e: lanpower_core::Error) -> Self {
        use lanpower_core::Error as E;
        match e {
            E::Config(_) | E::InvalidModel(_) | E::Domain(_) => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

pub fn run(cli: commands::Cli) -> Result<(), CliError> {
    let pool = thread_pool()?;
    pool.install(|| commands::dispatch(cli))
}

/// Parse `args` (including the program name) and run.
pub fn run_from<I, T>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = commands::Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    run(cli)
}

/// Rayon pool capped by `LANPOWER_THREADS` when set.
fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var("LANPOWER_THREADS") {
        let threads: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| CliError::Usage(format!("LANPOWER_THREADS must be a positive integer, got '{raw}'")))?;
        builder = builder.num_threads(threads);
    }
    builder.build().map_err(|e| CliError::Runtime(e.to_string()))
}
