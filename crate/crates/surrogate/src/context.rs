use embed::{matrix_of, StochasticMatrix};
use mlt_core::rng::rng_from_seed;
use mlt_core::PhrasebookSet;
use ndarray::Array2;
use rand::Rng as _;

use crate::{Result, SurrogateError};

/// In-context matrices `C_1..C_d`; each column is one-hot or all-zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextSet {
    n: usize,
    levels: Vec<StochasticMatrix>,
}

impl ContextSet {
    pub fn new(n: usize, levels: Vec<StochasticMatrix>) -> Result<Self> {
        if levels.is_empty() {
            return Err(SurrogateError::InvalidParameter("context needs at least one level".into()));
        }
        if levels.iter().any(|m| m.n() != n) {
            return Err(SurrogateError::DimensionMismatch("context levels disagree on n".into()));
        }
        Ok(ContextSet { n, levels })
    }

    pub fn empty(n: usize, d: usize) -> Self {
        ContextSet { n, levels: vec![StochasticMatrix::zero(n); d] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, i: usize) -> &StochasticMatrix {
        &self.levels[i]
    }

    pub fn levels(&self) -> &[StochasticMatrix] {
        &self.levels
    }

    pub fn dense(&self, i: usize) -> Array2<f64> {
        self.levels[i].to_dense()
    }

    /// Dense views of every level.
    pub fn dense_all(&self) -> Vec<Array2<f64>> {
        self.levels.iter().map(StochasticMatrix::to_dense).collect()
    }
}

/// Column-drop specification: per-level rates or an explicit dropped mask.
#[derive(Debug, Clone, PartialEq)]
pub enum DropoutSpec {
    Rates(Vec<f64>),
    /// `mask[level][column]` is true when the column is dropped.
    Mask(Vec<Vec<bool>>),
}

impl DropoutSpec {
    fn validate(&self, n: usize, d: usize) -> Result<()> {
        match self {
            DropoutSpec::Rates(p) => {
                if p.len() != d {
                    return Err(SurrogateError::InvalidParameter(format!("{} rates for depth {d}", p.len())));
                }
                if p.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
                    return Err(SurrogateError::InvalidParameter("drop rates must lie in [0, 1]".into()));
                }
            }
            DropoutSpec::Mask(m) => {
                if m.len() != d || m.iter().any(|row| row.len() != n * n) {
                    return Err(SurrogateError::InvalidParameter(format!("mask must be {d} x {}", n * n)));
                }
            }
        }
        Ok(())
    }
}

pub fn context_from(task: &PhrasebookSet) -> ContextSet {
    ContextSet { n: task.n(), levels: task.books().iter().map(matrix_of).collect() }
}

/// Zero column `k` of level `level` (both 0-based).
pub fn drop_column(ctx: &ContextSet, level: usize, k: usize) -> Result<ContextSet> {
    if level >= ctx.depth() || k >= ctx.n * ctx.n {
        return Err(SurrogateError::InvalidParameter(format!("no column ({level}, {k}) in context")));
    }
    let mut out = ctx.clone();
    out.levels[level].set_col(k, None);
    Ok(out)
}

/// Independent per-column retention; returns the contexts and the dropped mask.
pub fn random_drop(task: &PhrasebookSet, spec: &DropoutSpec, seed: u64) -> Result<(ContextSet, Vec<Vec<bool>>)> {
    let (n, d) = (task.n(), task.depth());
    spec.validate(n, d)?;
    let mask = match spec {
        DropoutSpec::Mask(m) => m.clone(),
        DropoutSpec::Rates(p) => {
            let mut rng = rng_from_seed(seed);
            p.iter().map(|&pi| (0..n * n).map(|_| rng.gen::<f64>() < pi).collect()).collect()
        }
    };
    let mut ctx = context_from(task);
    for (i, row) in mask.iter().enumerate() {
        for (k, &dropped) in row.iter().enumerate() {
            if dropped {
                ctx.levels[i].set_col(k, None);
            }
        }
    }
    Ok((ctx, mask))
}
