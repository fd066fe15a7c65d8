use mlt_core::Phrasebook;
use ndarray::Array2;

use crate::{EmbedError, Result, SeqEmbedding};

/// Binary `n^2 x n^2` matrix whose columns are one-hot or zero,
/// stored as the active row of each column.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StochasticMatrix {
    n: usize,
    cols: Vec<Option<usize>>,
}

impl StochasticMatrix {
    pub fn new(n: usize, cols: Vec<Option<usize>>) -> Result<Self> {
        if cols.len() != n * n {
            return Err(EmbedError::DimensionMismatch(format!("{} columns, expected {}", cols.len(), n * n)));
        }
        if let Some(c) = cols.iter().position(|r| r.is_some_and(|r| r >= n * n)) {
            return Err(EmbedError::NonDecodable { column: c });
        }
        Ok(StochasticMatrix { n, cols })
    }

    pub fn identity(n: usize) -> Self {
        StochasticMatrix { n, cols: (0..n * n).map(Some).collect() }
    }

    pub fn zero(n: usize) -> Self {
        StochasticMatrix { n, cols: vec![None; n * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.n * self.n
    }

    pub fn col(&self, k: usize) -> Option<usize> {
        self.cols[k]
    }

    pub fn cols(&self) -> &[Option<usize>] {
        &self.cols
    }

    pub fn set_col(&mut self, k: usize, row: Option<usize>) {
        assert!(row.is_none_or(|r| r < self.size()));
        self.cols[k] = row;
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut m = Array2::zeros((self.size(), self.size()));
        for (c, r) in self.cols.iter().enumerate() {
            if let Some(r) = r {
                m[[*r, c]] = 1.0;
            }
        }
        m
    }

    pub fn from_dense(n: usize, m: &Array2<f64>) -> Result<Self> {
        if m.dim() != (n * n, n * n) {
            return Err(EmbedError::DimensionMismatch(format!("shape {:?}", m.dim())));
        }
        let mut cols = Vec::with_capacity(n * n);
        for (c, col) in m.columns().into_iter().enumerate() {
            let mut active = None;
            for (r, &v) in col.iter().enumerate() {
                if v == 1.0 && active.is_none() {
                    active = Some(r);
                } else if v != 0.0 {
                    return Err(EmbedError::NonDecodable { column: c });
                }
            }
            cols.push(active);
        }
        StochasticMatrix::new(n, cols)
    }

    /// True when every column is one-hot and every row is hit exactly once.
    pub fn is_permutation(&self) -> bool {
        let mut hit = vec![false; self.size()];
        for r in &self.cols {
            match r {
                Some(r) if !hit[*r] => hit[*r] = true,
                _ => return false,
            }
        }
        true
    }

    /// Matrix-vector product on each one-hot column of `v`.
    pub fn apply(&self, v: &SeqEmbedding) -> Result<SeqEmbedding> {
        if v.n() != self.n {
            return Err(EmbedError::DimensionMismatch("alphabet sizes differ".into()));
        }
        let cols = v
            .cols()
            .iter()
            .enumerate()
            .map(|(j, &c)| self.cols[c].ok_or(EmbedError::NonDecodable { column: j }))
            .collect::<Result<Vec<_>>>()?;
        SeqEmbedding::new(self.n, cols)
    }
}

/// Column `i` is one-hot at row `perm[i]`.
pub fn matrix_of(pb: &Phrasebook) -> StochasticMatrix {
    StochasticMatrix { n: pb.n(), cols: pb.perm().iter().map(|&r| Some(r)).collect() }
}
