//! How often the gradient on a dropped first-level column points at the
//! right rule, under random context dropout.

mod accuracy;
mod chart;
mod rank;
mod sweep;

pub use accuracy::{fd_argmax, gradient_argmax, gradient_prediction_accuracy, Batch, GpaEstimate, DEFAULT_SCALE, RESAMPLE_CAP};
pub use chart::sweep_svg;
pub use rank::{spearman, spearman_test, SpearmanTest};
pub use sweep::{grad_acc_sweep, SweepGrid, SweepReport, SweepRow};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GradAccError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no first-level column dropped after {0} draws")]
    NothingDropped(usize),
    #[error(transparent)]
    Surrogate(#[from] surrogate::SurrogateError),
    #[error(transparent)]
    Core(#[from] mlt_core::MltError),
}

pub type Result<T> = std::result::Result<T, GradAccError>;
