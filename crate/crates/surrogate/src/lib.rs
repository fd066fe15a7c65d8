//! The surrogate translation model: `V_{i+1} = HardMax(C_i + W_i) Shift(V_i)`,
//! its softmax relaxation, the multilinear substrate used for gradients,
//! context construction and dropout, and coverable-input sampling.

mod context;
mod coverable;
mod forward;
mod hardmax;
mod io;
mod soft;
mod weights;

pub use context::{context_from, drop_column, random_drop, ContextSet, DropoutSpec};
pub use coverable::{coverable_length, is_coverable, sample_coverable, CoverableSample, DEFAULT_ATTEMPT_CAP};
pub use forward::{augmented_forward, effective_matrices, forward_continuous, forward_effective, forward_hard, HardOutput};
pub use hardmax::{column_argmax, hardmax_cols, HardMax};
pub use io::{parse_matrices, write_matrices};
pub use soft::{
    cross_entropy, forward_soft, soft_backward, soft_backward_from, soft_shift, soft_shift_backward, softmax_cols,
    SoftPass, DEFAULT_SCALE,
};
pub use weights::Weights;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurrogateError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no coverable input after {attempts} attempts at length {len}")]
    SamplingFailure { attempts: usize, len: usize },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Embed(#[from] embed::EmbedError),
    #[error(transparent)]
    Core(#[from] mlt_core::MltError),
}

pub type Result<T> = std::result::Result<T, SurrogateError>;
