//! Front end for `pfaff-core`: system files, the example registry, analyses and reports.

use pfaff_core::symbolic::parse::ParseError;
use thiserror::Error;

pub mod commands;
pub mod dsl;
pub mod registry;
pub mod report;

pub use commands::{analyze, cartan_hilbert_report, load_input, Command, Options};
pub use report::Report;

fn did_you_mean(s: &[String]) -> String {
    if s.is_empty() {
        String::new()
    } else {
        format!("; did you mean {}?", s.iter().map(|n| format!("`{n}`")).collect::<Vec<_>>().join(", "))
    }
}

/// Input-level failures; the binary exits with status 1 on these.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{origin}:{error}")]
    Parse { origin: String, error: ParseError },
    #[error("unknown example `{name}`{}", did_you_mean(suggestions))]
    UnknownExample { name: String, suggestions: Vec<String> },
    #[error("no file or example named `{name}`{}", did_you_mean(suggestions))]
    UnknownInput { name: String, suggestions: Vec<String> },
    #[error("`{name}` is not a declared {kind}")]
    UnknownName { kind: &'static str, name: String },
    #[error("{flag} `{text}`: {error}")]
    BadArgument { flag: &'static str, text: String, error: ParseError },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// `(line, col)` of a parse diagnostic.
    pub fn position(&self) -> Option<(usize, usize)> {
        match self {
            CliError::Parse { error, .. } | CliError::BadArgument { error, .. } => Some(error.position()),
            _ => None,
        }
    }
}
