//! Experiment commands. Each one takes a resolved config and returns the
//! files it produces plus a one-paragraph summary; `main` does the I/O.

mod chart;
mod commands;
mod config;

pub use chart::trace_svg;
pub use commands::*;
pub use config::{header, parse_file, resolve, SECTIONS};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("input: {0}")]
    Input(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] mlt_core::MltError),
    #[error(transparent)]
    Surrogate(#[from] surrogate::SurrogateError),
    #[error(transparent)]
    Learn(#[from] learn::LearnError),
    #[error(transparent)]
    Sq(#[from] sq_probe::SqError),
    #[error(transparent)]
    GradAcc(#[from] grad_acc::GradAccError),
    #[error(transparent)]
    Transformer(#[from] tf_sim::TfError),
}

pub type Result<T> = std::result::Result<T, CliError>;

/// What a command produced. `ok` is false when the run completed but its
/// check failed (recovery incomplete, equivalence mismatch, bound exceeded).
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub files: Vec<(String, String)>,
    pub summary: String,
    pub ok: bool,
}
