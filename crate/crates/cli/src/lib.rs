//! Command-line front end for `fracvel`.
//!
//! `parse_args` turns an argument vector into a validated [`RunConfig`],
//! [`run::execute`] dispatches it to the library and [`output`] renders the
//! result as JSON or CSV.

pub mod config;
pub mod funcspec;
pub mod output;
pub mod run;
pub mod samples;

use std::ffi::OsString;
use std::path::PathBuf;

use thiserror::Error;

pub use config::{parse_args, Command, DirectionChoice, Format, RunConfig, TheoremChoice};
pub use funcspec::{FunctionSpec, LoadedFunction};
pub use output::{emit_report, format_float, render_json};
pub use run::{execute, Outcome};
pub use samples::load_samples;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ANALYSIS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, parameters or input files.
    #[error("{0}")]
    Usage(String),

    /// The analysis ran but could not produce the requested quantity.
    #[error("{0}")]
    Analysis(String),

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Analysis(_) => EXIT_ANALYSIS,
            Self::Usage(_) | Self::Write { .. } => EXIT_USAGE,
        }
    }
}

impl From<fracvel::Error> for CliError {
    fn from(e: fracvel::Error) -> Self {
        use fracvel::Error as E;
        match e {
            E::Argument { .. } | E::Domain { .. } => Self::Usage(e.to_string()),
            _ => Self::Analysis(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Parses, runs and emits; returns the process exit code.
pub fn main_with<I, A>(argv: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cfg = match parse_args(argv) {
        Ok(config::Parsed::Run(cfg)) => cfg,
        Ok(config::Parsed::Info(text)) => {
            print!("{text}");
            return EXIT_OK;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let outcome = match execute(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    if let Err(e) = emit_report(&outcome.text, cfg.out.as_deref()) {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    for msg in &outcome.failures {
        eprintln!("analysis failure: {msg}");
    }
    if outcome.failures.is_empty() {
        EXIT_OK
    } else {
        EXIT_ANALYSIS
    }
}
