use embed::{shift_op, SeqEmbedding, StochasticMatrix};
use ndarray::{s, Array2};

use crate::hardmax::hardmax_cols;
use crate::soft::soft_shift;
use crate::{ContextSet, Result, SurrogateError, Weights};

#[derive(Debug, Clone, PartialEq)]
pub struct HardOutput {
    pub output: SeqEmbedding,
    /// Levels whose effective matrix needed a tie-break.
    pub tied_levels: Vec<usize>,
}

pub(crate) fn check_dims(w: &Weights, c: &ContextSet, n: usize) -> Result<()> {
    if w.n() != c.n() || w.n() != n {
        return Err(SurrogateError::DimensionMismatch("weights, contexts and input disagree on n".into()));
    }
    if w.depth() != c.depth() {
        return Err(SurrogateError::DimensionMismatch(format!(
            "{} weight levels vs {} context levels",
            w.depth(),
            c.depth()
        )));
    }
    Ok(())
}

/// `HardMax(C_i + W_i)` for every level, with the levels that hit ties.
pub fn effective_matrices(w: &Weights, c: &ContextSet) -> Result<(Vec<StochasticMatrix>, Vec<usize>)> {
    check_dims(w, c, w.n())?;
    let mut mats = Vec::with_capacity(w.depth());
    let mut tied = Vec::new();
    for i in 0..w.depth() {
        let h = hardmax_cols(&(c.dense(i) + w.level(i)), w.n());
        if h.has_ties() {
            tied.push(i);
        }
        mats.push(h.matrix);
    }
    Ok((mats, tied))
}

/// Runs the recurrence with precomputed effective matrices.
pub fn forward_effective(effective: &[StochasticMatrix], v: &SeqEmbedding) -> Result<SeqEmbedding> {
    let mut cur = v.clone();
    for m in effective {
        cur = m.apply(&shift_op(&cur))?;
    }
    Ok(cur)
}

pub fn forward_hard(w: &Weights, c: &ContextSet, v: &SeqEmbedding) -> Result<HardOutput> {
    check_dims(w, c, v.n())?;
    let (mats, tied_levels) = effective_matrices(w, c)?;
    Ok(HardOutput { output: forward_effective(&mats, v)?, tied_levels })
}

/// `V_{i+1} = P_i Shift(V_i)` with no nonlinearity.
pub fn forward_continuous(p: &[Array2<f64>], v: &Array2<f64>, n: usize) -> Array2<f64> {
    let mut cur = v.clone();
    for pi in p {
        cur = pi.dot(&soft_shift(&cur, n));
    }
    cur
}

/// The same model run on the stacked input `X_1 = [C_1 .. C_d, V_1]`.
/// Each level reads `C_i` and `V_i` back out of `X_i` with block selectors.
pub fn augmented_forward(w: &Weights, c: &ContextSet, v: &SeqEmbedding) -> Result<SeqEmbedding> {
    check_dims(w, c, v.n())?;
    let n = v.n();
    let (size, d, m) = (n * n, w.depth(), v.num_cols());
    let width = d * size + m;
    let mut x = Array2::<f64>::zeros((size, width));
    for i in 0..d {
        x.slice_mut(s![.., i * size..(i + 1) * size]).assign(&c.dense(i));
    }
    x.slice_mut(s![.., d * size..]).assign(&v.to_dense());

    let mut keep_ctx = Array2::<f64>::zeros((width, width));
    for k in 0..d * size {
        keep_ctx[[k, k]] = 1.0;
    }
    let mut take_v = Array2::<f64>::zeros((width, m));
    for j in 0..m {
        take_v[[d * size + j, j]] = 1.0;
    }
    for i in 0..d {
        let mut take_c = Array2::<f64>::zeros((width, size));
        for k in 0..size {
            take_c[[i * size + k, k]] = 1.0;
        }
        let ci = x.dot(&take_c);
        let vi = SeqEmbedding::from_dense(n, &x.dot(&take_v))?;
        let eff = hardmax_cols(&(ci + w.level(i)), n).matrix;
        let next = eff.apply(&shift_op(&vi))?.to_dense();
        let mut update = Array2::<f64>::zeros((size, width));
        update.slice_mut(s![.., d * size..]).assign(&next);
        x = x.dot(&keep_ctx) + update;
    }
    Ok(SeqEmbedding::from_dense(n, &x.dot(&take_v))?)
}
