//! Learning the phrasebooks of a surrogate model from one input/output pair
//! with the other rules supplied in context.
//!
//! Levels are 0-based throughout the API; CSV exports print them 1-based to
//! line up with the `match_1..match_d` columns.

mod d2;
mod grad;
mod search;
mod soft_gd;
mod trace;

pub use d2::gd_d2;
pub use grad::{oracle_grad, surrogate_grad_col, GradCaseTally, GradMethod, SurrogateGrad, ORACLE_STEP};
pub use search::{heuristic_search, SearchReport};
pub use soft_gd::{gd_soft, gd_soft_on, GdMode, MaskSchedule, SoftGdConfig, DEFAULT_INPUT_DELTA};
pub use trace::{column_match_fraction, GdTrace, TraceRow};

use thiserror::Error;

/// Why a column could not be pinned down by search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ambiguity {
    NoCandidate,
    SeveralCandidates,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LearnError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("column {column} of level {level} is unresolvable ({kind:?})")]
    Unresolvable { level: usize, column: usize, kind: Ambiguity },
    #[error("recovery failed on {} column(s), first at level {} column {}", .mismatched.len(), .mismatched[0].0, .mismatched[0].1)]
    RecoveryFailed { mismatched: Vec<(usize, usize)> },
    #[error(transparent)]
    Surrogate(#[from] surrogate::SurrogateError),
    #[error(transparent)]
    Embed(#[from] embed::EmbedError),
    #[error(transparent)]
    Core(#[from] mlt_core::MltError),
}

pub type Result<T> = std::result::Result<T, LearnError>;
