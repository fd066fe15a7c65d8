use embed::SeqEmbedding;
use ndarray::{Array2, Zip};

use crate::forward::check_dims;
use crate::{ContextSet, Result, Weights};

/// Inverse temperature of the relaxed model.
pub const DEFAULT_SCALE: f64 = 25.0;

/// Below this the log-likelihood is clamped (and its gradient is zero).
const PROB_FLOOR: f64 = 1e-300;

pub fn softmax_cols(z: &Array2<f64>) -> Array2<f64> {
    let mut out = z.clone();
    for mut col in out.columns_mut() {
        let max = col.fold(f64::NEG_INFINITY, |m, &x| m.max(x));
        col.mapv_inplace(|x| (x - max).exp());
        let sum = col.sum();
        col.mapv_inplace(|x| x / sum);
    }
    out
}

fn marginals(v: &Array2<f64>, n: usize) -> (Array2<f64>, Array2<f64>) {
    let m = v.ncols();
    let mut second = Array2::zeros((n, m));
    let mut first = Array2::zeros((n, m));
    for x in 0..n {
        for y in 0..n {
            let row = v.row(x * n + y);
            for j in 0..m {
                second[[y, j]] += row[j];
                first[[x, j]] += row[j];
            }
        }
    }
    (second, first)
}

/// Bilinear shift on real columns: entry `(a,b)` of column `j` is
/// P(second char of column j = a) * P(first char of column j+1 = b).
/// Equal to the `Q`/Hadamard formula, computed in `O(n^2 M)`.
pub fn soft_shift(v: &Array2<f64>, n: usize) -> Array2<f64> {
    let m = v.ncols();
    let (second, first) = marginals(v, n);
    let mut out = Array2::zeros(v.dim());
    for a in 0..n {
        for b in 0..n {
            let mut row = out.row_mut(a * n + b);
            for j in 0..m {
                row[j] = second[[a, j]] * first[[b, (j + 1) % m]];
            }
        }
    }
    out
}

/// Pulls a gradient on `soft_shift(v)` back to `v`.
pub fn soft_shift_backward(v: &Array2<f64>, grad_out: &Array2<f64>, n: usize) -> Array2<f64> {
    let m = v.ncols();
    let (second, first) = marginals(v, n);
    let mut d_second = Array2::<f64>::zeros((n, m));
    let mut d_first = Array2::<f64>::zeros((n, m));
    for a in 0..n {
        for b in 0..n {
            let g = grad_out.row(a * n + b);
            for j in 0..m {
                let next = (j + 1) % m;
                d_second[[a, j]] += g[j] * first[[b, next]];
                d_first[[b, next]] += g[j] * second[[a, j]];
            }
        }
    }
    let mut grad = Array2::zeros(v.dim());
    for x in 0..n {
        for y in 0..n {
            let mut row = grad.row_mut(x * n + y);
            for j in 0..m {
                row[j] = d_second[[y, j]] + d_first[[x, j]];
            }
        }
    }
    grad
}

/// Cached activations of one relaxed forward pass.
#[derive(Debug, Clone)]
pub struct SoftPass {
    pub n: usize,
    pub scale: f64,
    /// `states[0]` is the input; `states[i+1]` the output of level `i`.
    pub states: Vec<Array2<f64>>,
    pub shifted: Vec<Array2<f64>>,
    pub probs: Vec<Array2<f64>>,
}

impl SoftPass {
    pub fn output(&self) -> &Array2<f64> {
        self.states.last().unwrap()
    }
}

/// Column-wise `softmax(scale * (C_i + W_i))` in place of the hard max.
pub fn forward_soft(w: &Weights, c: &ContextSet, v: &SeqEmbedding, scale: f64) -> Result<SoftPass> {
    check_dims(w, c, v.n())?;
    let n = v.n();
    let mut states = vec![v.to_dense()];
    let mut shifted = Vec::with_capacity(w.depth());
    let mut probs = Vec::with_capacity(w.depth());
    for i in 0..w.depth() {
        let z = (c.dense(i) + w.level(i)) * scale;
        let p = softmax_cols(&z);
        let sh = soft_shift(states.last().unwrap(), n);
        states.push(p.dot(&sh));
        shifted.push(sh);
        probs.push(p);
    }
    Ok(SoftPass { n, scale, states, shifted, probs })
}

/// Sum over columns of `-ln out[target_j, j]`.
pub fn cross_entropy(out: &Array2<f64>, target: &SeqEmbedding) -> f64 {
    target
        .cols()
        .iter()
        .enumerate()
        .map(|(j, &t)| -out[[t, j]].max(PROB_FLOOR).ln())
        .sum()
}

/// Loss and weight gradients for levels `lowest..d`; lower levels get zeros.
pub fn soft_backward_from(pass: &SoftPass, target: &SeqEmbedding, lowest: usize) -> (f64, Vec<Array2<f64>>) {
    let d = pass.probs.len();
    let n = pass.n;
    let out = pass.output();
    let loss = cross_entropy(out, target);

    let mut grad_state = Array2::<f64>::zeros(out.dim());
    for (j, &t) in target.cols().iter().enumerate() {
        let p = out[[t, j]];
        if p > PROB_FLOOR {
            grad_state[[t, j]] = -1.0 / p;
        }
    }
    let mut grads = vec![Array2::<f64>::zeros((n * n, n * n)); d];
    for i in (lowest..d).rev() {
        let p = &pass.probs[i];
        let sh = &pass.shifted[i];
        let grad_p = grad_state.dot(&sh.t());
        if i > lowest {
            let grad_sh = p.t().dot(&grad_state);
            grad_state = soft_shift_backward(&pass.states[i], &grad_sh, n);
        }
        let mut gz = grad_p;
        for (mut gcol, pcol) in gz.columns_mut().into_iter().zip(p.columns()) {
            let dot = gcol.dot(&pcol);
            Zip::from(&mut gcol).and(&pcol).for_each(|g, &s| *g = pass.scale * s * (*g - dot));
        }
        grads[i] = gz;
    }
    (loss, grads)
}

/// Reverse-mode gradients of the column-summed cross entropy w.r.t. every `W_i`.
pub fn soft_backward(
    w: &Weights,
    c: &ContextSet,
    v: &SeqEmbedding,
    target: &SeqEmbedding,
    scale: f64,
) -> Result<(f64, Vec<Array2<f64>>)> {
    let pass = forward_soft(w, c, v, scale)?;
    Ok(soft_backward_from(&pass, target, 0))
}
