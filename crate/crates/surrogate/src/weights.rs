use embed::matrix_of;
use mlt_core::PhrasebookSet;
use ndarray::Array2;

use crate::{Result, SurrogateError};

/// Trainable matrices `W_1..W_d`, each `n^2 x n^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    n: usize,
    levels: Vec<Array2<f64>>,
}

impl Weights {
    pub fn new(n: usize, levels: Vec<Array2<f64>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(SurrogateError::InvalidParameter("weights need at least one level".into()));
        }
        if levels.iter().any(|m| m.dim() != (n * n, n * n)) {
            return Err(SurrogateError::DimensionMismatch(format!("every level must be {0} x {0}", n * n)));
        }
        if levels.iter().flatten().any(|x| !x.is_finite()) {
            return Err(SurrogateError::InvalidParameter("weights must be finite".into()));
        }
        Ok(Weights { n, levels })
    }

    pub fn zeros(n: usize, d: usize) -> Self {
        Weights { n, levels: vec![Array2::zeros((n * n, n * n)); d] }
    }

    /// `W_i = Matrix(pi_i)`.
    pub fn planted(task: &PhrasebookSet) -> Self {
        Weights { n: task.n(), levels: task.books().iter().map(|pb| matrix_of(pb).to_dense()).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, i: usize) -> &Array2<f64> {
        &self.levels[i]
    }

    pub fn level_mut(&mut self, i: usize) -> &mut Array2<f64> {
        &mut self.levels[i]
    }

    pub fn levels(&self) -> &[Array2<f64>] {
        &self.levels
    }

    /// Largest absolute entry over all levels.
    pub fn max_abs(&self) -> f64 {
        self.levels.iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
    }
}
