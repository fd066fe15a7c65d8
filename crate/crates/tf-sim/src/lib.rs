//! A transformer with hand-set weights that runs the surrogate model: each
//! level is a shift block (attention + GELU product MLP) followed by a
//! translate block (context lookup attention + GELU/normalize MLP).

mod dump;
mod layers;
mod layout;
mod model;

pub use dump::dump_model;
pub use layers::{gelu, gelu_product, AttnMode, Head, MlpLayer, RelAttnLayer};
pub use layout::{decode_output, encode_input, EmbSeq, Layout};
pub use model::{build_transformer, transformer_forward, ForwardReport, Layer, TransformerModel, DEFAULT_LAMBDA, DEFAULT_N};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TfError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("layout: {0}")]
    Layout(String),
    #[error("position {position}: largest token entry {value} is below 0.5")]
    LowConfidence { position: usize, value: f64 },
    #[error("position {position}: tied maximum in token entries")]
    Tie { position: usize },
    #[error(transparent)]
    Embed(#[from] embed::EmbedError),
    #[error(transparent)]
    Core(#[from] mlt_core::MltError),
}

pub type Result<T> = std::result::Result<T, TfError>;
