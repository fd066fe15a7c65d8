use mlt_core::Sequence;
use ndarray::Array2;

use crate::{EmbedError, Result};

/// `n^2 x (L/2)` matrix whose columns are one-hot, stored as the active rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SeqEmbedding {
    n: usize,
    cols: Vec<usize>,
}

impl SeqEmbedding {
    pub fn new(n: usize, cols: Vec<usize>) -> Result<Self> {
        if cols.is_empty() {
            return Err(EmbedError::DimensionMismatch("embedding needs at least one column".into()));
        }
        if let Some(c) = cols.iter().position(|&r| r >= n * n) {
            return Err(EmbedError::NonDecodable { column: c });
        }
        Ok(SeqEmbedding { n, cols })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> usize {
        self.n * self.n
    }

    pub fn num_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut m = Array2::zeros((self.rows(), self.cols.len()));
        for (j, &r) in self.cols.iter().enumerate() {
            m[[r, j]] = 1.0;
        }
        m
    }

    /// Exact decode: every column must be a 0/1 one-hot vector.
    pub fn from_dense(n: usize, m: &Array2<f64>) -> Result<Self> {
        if m.nrows() != n * n {
            return Err(EmbedError::DimensionMismatch(format!("{} rows, expected {}", m.nrows(), n * n)));
        }
        let mut cols = Vec::with_capacity(m.ncols());
        for (j, col) in m.columns().into_iter().enumerate() {
            let mut active = None;
            for (r, &v) in col.iter().enumerate() {
                if v == 1.0 && active.is_none() {
                    active = Some(r);
                } else if v != 0.0 {
                    return Err(EmbedError::NonDecodable { column: j });
                }
            }
            cols.push(active.ok_or(EmbedError::NonDecodable { column: j })?);
        }
        SeqEmbedding::new(n, cols)
    }
}

pub fn mat(s: &Sequence) -> SeqEmbedding {
    SeqEmbedding { n: s.n(), cols: s.pair_indices() }
}

pub fn unmat(v: &SeqEmbedding) -> Result<Sequence> {
    Ok(Sequence::from_pair_indices(v.n, &v.cols)?)
}
