//! Brute-force checks of the combinatorics behind the hardness argument for
//! binary alphabets: the 24 tuple bijections, their copy/xor/not structure,
//! pairwise output correlations and how they decay with depth.

mod census;
mod correlation;
mod decay;
mod uniformity;

pub use census::{
    all_bijections_n2, both_position_census, enumerate_bijections_n2, map_pair_correlation_census, MapCensus,
    MapInfo, Op, PairCensus, DELTA_OPS,
};
pub use correlation::{correlation, task_correlation, CorrelationEstimate, CorrelationMode, EXACT_LIMIT_BITS};
pub use decay::{decay_bound, decay_csv, decay_experiment, DecayRow};
pub use uniformity::{uniformity_probe, StatKind, UniformityRow};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SqError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("exact enumeration needs 2^{bits} inputs, above the 2^{limit} limit")]
    TooLarge { bits: usize, limit: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Core(#[from] mlt_core::MltError),
}

pub type Result<T> = std::result::Result<T, SqError>;
