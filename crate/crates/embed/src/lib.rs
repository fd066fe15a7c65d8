//! One-hot matrix calculus for sequences and phrasebooks.
//!
//! Sparse index forms are canonical; dense `ndarray` views exist for the
//! Kronecker/Hadamard formulas and for the soft models downstream.

mod matrix;
mod seq;
mod shift;

pub use matrix::{matrix_of, StochasticMatrix};
pub use seq::{mat, unmat, SeqEmbedding};
pub use shift::{kron, q_matrix, shift_dense, shift_op};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EmbedError {
    #[error("column {column} is not one-hot")]
    NonDecodable { column: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Core(#[from] mlt_core::MltError),
}

pub type Result<T> = std::result::Result<T, EmbedError>;
