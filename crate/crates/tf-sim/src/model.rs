use embed::q_matrix;
use ndarray::{s, Array2};
use surrogate::Weights;

use crate::layers::{AttnMode, Head, MlpLayer, RelAttnLayer};
use crate::layout::{EmbSeq, Layout};
use crate::{Result, TfError};

/// Input scale of the GELU product channels.
pub const DEFAULT_N: f64 = 100.0;
/// Logit scale of the saturated attention mode.
pub const DEFAULT_LAMBDA: f64 = 30.0;
/// Added under the square root of the token normalization.
const NORM_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Layer {
    Attn(RelAttnLayer),
    Mlp(MlpLayer),
}

/// Four layers per level: shift attention, product MLP, context attention,
/// translate MLP.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformerModel {
    pub n: usize,
    pub d: usize,
    pub big_n: f64,
    pub lambda: f64,
    pub mode: AttnMode,
    pub layers: Vec<Layer>,
    /// The in-weights matrices folded into the translate MLPs.
    pub weights: Vec<Array2<f64>>,
}

impl TransformerModel {
    pub fn width(&self) -> usize {
        2 * self.n * self.n + 2 * self.d + 4
    }

    pub fn saturated(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self.mode = AttnMode::Saturated { lambda };
        self
    }
}

fn shift_attention(lay: &Layout) -> RelAttnLayer {
    let (w, size) = (lay.width(), lay.size());
    let q = q_matrix(lay.n);
    // Previous position, shifted toward the second character.
    let mut prev = Head::zeros(w, 1.0);
    prev.biases = vec![0.0, 2.0];
    // Own position, shifted toward the first character.
    let mut own = Head::zeros(w, 1.0);
    own.biases = vec![2.0];
    // End marker looks back at the start marker to close the circle.
    let mut wrap = Head::zeros(w, 1.0);
    wrap.query[[lay.end_dim(), lay.end_dim()]] = 2.0;
    wrap.key[[lay.end_dim(), lay.start_dim()]] = 1.0;
    for r in 0..size {
        for c in 0..size {
            prev.value[[lay.tok(r), lay.tok(c)]] = q[[r, c]];
            own.value[[lay.tok_hi(r), lay.tok(c)]] = q[[c, r]];
            wrap.value[[lay.tok_hi(r), lay.tok(c)]] = q[[c, r]];
        }
    }
    RelAttnLayer { heads: vec![prev, own, wrap] }
}

fn product_mlp(lay: &Layout, big_n: f64) -> MlpLayer {
    let (w, size) = (lay.width(), lay.size());
    let mut inner = Array2::zeros((3 * size, w));
    let mut outer = Array2::zeros((w, 3 * size));
    let gain = (std::f64::consts::PI / 2.0).sqrt() * big_n * big_n;
    for r in 0..size {
        inner[[r, lay.tok(r)]] = 1.0 / big_n;
        inner[[r, lay.tok_hi(r)]] = 1.0 / big_n;
        inner[[size + r, lay.tok(r)]] = 1.0 / big_n;
        inner[[2 * size + r, lay.tok_hi(r)]] = 1.0 / big_n;
        outer[[lay.tok(r), r]] = gain;
        outer[[lay.tok(r), size + r]] = -gain;
        outer[[lay.tok(r), 2 * size + r]] = -gain;
    }
    MlpLayer { inner, outer, normalize: None }
}

fn context_attention(lay: &Layout, level: usize) -> RelAttnLayer {
    let (w, size) = (lay.width(), lay.size());
    // Score 2<e_r, V> + [key level == level] - 3 [key in query segment];
    // the matching context token scores 3, everything else at most 2.
    let mut lookup = Head::zeros(w, 2.0);
    for r in 0..size {
        lookup.query[[lay.tok(r), lay.tok(r)]] = 2.0;
        lookup.key[[lay.tok(r), lay.tok(r)]] = 1.0;
        lookup.value[[lay.tok(r), lay.tok_hi(r)]] = 1.0;
    }
    lookup.query[[lay.level_dim(level), lay.seg2_dim()]] = 1.0;
    for l in 0..lay.d {
        lookup.key[[lay.level_dim(l), lay.level_dim(l)]] = 1.0;
    }
    lookup.query[[lay.seg2_dim(), lay.seg2_dim()]] = 1.0;
    lookup.key[[lay.seg2_dim(), lay.seg2_dim()]] = -3.0;
    let mut copy = Head::zeros(w, 1.0);
    copy.biases = vec![2.0];
    for r in 0..size {
        copy.value[[lay.tok_hi(r), lay.tok(r)]] = 1.0;
    }
    RelAttnLayer { heads: vec![lookup, copy] }
}

fn translate_mlp(lay: &Layout, w_level: &Array2<f64>) -> MlpLayer {
    let (w, size) = (lay.width(), lay.size());
    let mut inner = Array2::zeros((size, w));
    let mut outer = Array2::zeros((w, size));
    for r in 0..size {
        inner[[r, lay.tok(r)]] = 1.0;
        for c in 0..size {
            inner[[r, lay.tok_hi(c)]] = w_level[[r, c]];
        }
        outer[[lay.tok(r), r]] = 1.0;
    }
    MlpLayer { inner, outer, normalize: Some((size, NORM_EPS)) }
}

/// Hard-pattern model with `N = 100`; see [`TransformerModel::saturated`].
pub fn build_transformer(n: usize, d: usize, w: &Weights) -> Result<TransformerModel> {
    if n < 2 || d < 1 {
        return Err(TfError::InvalidParameter(format!("need n >= 2 and d >= 1, got n={n} d={d}")));
    }
    if w.n() != n || w.depth() != d {
        return Err(TfError::InvalidParameter(format!("weights are for n={} d={}", w.n(), w.depth())));
    }
    // Only the width matters for weights; `m` is irrelevant here.
    let lay = Layout { n, d, m: 1 };
    let mut layers = Vec::with_capacity(4 * d);
    for i in 0..d {
        layers.push(Layer::Attn(shift_attention(&lay)));
        layers.push(Layer::Mlp(product_mlp(&lay, DEFAULT_N)));
        layers.push(Layer::Attn(context_attention(&lay, i)));
        layers.push(Layer::Mlp(translate_mlp(&lay, w.level(i))));
    }
    Ok(TransformerModel {
        n,
        d,
        big_n: DEFAULT_N,
        lambda: DEFAULT_LAMBDA,
        mode: AttnMode::HardPattern,
        layers,
        weights: w.levels().to_vec(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForwardReport {
    pub output: EmbSeq,
    /// Largest `|MLP output - exact product|` over product-MLP entries.
    pub gelu_stage_max_error: f64,
    /// Largest attention mass outside the hard pattern (0 in hard mode).
    pub max_off_pattern_mass: f64,
    /// Per attention layer, per head, the realized weights.
    pub attention: Vec<Vec<Array2<f64>>>,
    /// `(level, column)` where context and weights neither leave one side
    /// empty nor agree on a one-hot column, so the normalization is not a
    /// hard max there.
    pub flagged_columns: Vec<(usize, usize)>,
}

fn off_pattern_mass(realized: &Array2<f64>, hard: &Array2<f64>, active: &[bool]) -> f64 {
    let mut worst: f64 = 0.0;
    for p in (0..active.len()).filter(|&p| active[p]) {
        let (r, h) = (realized.row(p), hard.row(p));
        let on: f64 = r.iter().zip(h.iter()).filter(|(_, &hv)| hv > 0.0).map(|(rv, _)| rv).sum();
        let mass = if h.sum() > 0.0 { 1.0 - on } else { r.sum() };
        worst = worst.max(mass);
    }
    worst
}

fn flagged(emb: &EmbSeq, weights: &[Array2<f64>]) -> Vec<(usize, usize)> {
    let lay = emb.layout;
    let one_hot = |v: Vec<f64>| -> Option<usize> {
        let nz: Vec<usize> = (0..v.len()).filter(|&i| v[i] != 0.0).collect();
        (nz.len() == 1 && v[nz[0]] == 1.0).then(|| nz[0])
    };
    let mut out = Vec::new();
    for (level, w) in weights.iter().enumerate() {
        for r in 0..lay.size() {
            let row = emb.rows.row(lay.context_pos(level, r));
            let c: Vec<f64> = (0..lay.size()).map(|k| row[lay.tok_hi(k)]).collect();
            let wc: Vec<f64> = w.column(r).to_vec();
            let empty = |v: &[f64]| v.iter().all(|&x| x == 0.0);
            let ok = empty(&c) || empty(&wc) || matches!((one_hot(c.clone()), one_hot(wc.clone())), (Some(a), Some(b)) if a == b);
            if !ok {
                out.push((level, r));
            }
        }
    }
    out
}

/// Runs every level, then moves the markers right by one and turns the old
/// start position into a null position.
pub fn transformer_forward(model: &TransformerModel, input: &EmbSeq) -> Result<ForwardReport> {
    let lay = input.layout;
    if lay.n != model.n || lay.d != model.d || input.rows.ncols() != model.width() {
        return Err(TfError::Layout("embedding does not match the model".into()));
    }
    let mut emb = input.clone();
    let flagged_columns = flagged(&emb, &model.weights);
    let mut gelu_err: f64 = 0.0;
    let mut off: f64 = 0.0;
    let mut attention = Vec::new();
    let token = 2 * lay.size();
    for (li, layer) in model.layers.iter().enumerate() {
        let active: Vec<bool> = (0..lay.positions()).map(|p| emb.in_query_segment(p) && !emb.think[p]).collect();
        match layer {
            Layer::Attn(attn) => {
                let (out, weights) = attn.apply(&emb.rows, &emb.think, &active, model.mode);
                if model.mode != AttnMode::HardPattern {
                    for (head, w) in attn.heads.iter().zip(&weights) {
                        let hard = head.weights(&emb.rows, &emb.think, &active, AttnMode::HardPattern);
                        off = off.max(off_pattern_mass(w, &hard, &active));
                    }
                }
                for p in (0..active.len()).filter(|&p| active[p]) {
                    emb.rows.slice_mut(s![p, ..token]).assign(&out.slice(s![p, ..token]));
                }
                attention.push(weights);
            }
            Layer::Mlp(mlp) => {
                let product_stage = li % 4 == 1;
                for p in (0..active.len()).filter(|&p| active[p]) {
                    let x = emb.rows.row(p).to_owned();
                    let y = mlp.apply_row(&x);
                    if product_stage {
                        for r in 0..lay.size() {
                            let exact = x[lay.tok(r)] * x[lay.tok_hi(r)];
                            gelu_err = gelu_err.max((y[lay.tok(r)] - exact).abs());
                        }
                    }
                    emb.rows.slice_mut(s![p, ..token]).assign(&y.slice(s![..token]));
                }
            }
        }
        if li % 4 == 3 {
            advance_markers(&mut emb)?;
        }
    }
    Ok(ForwardReport {
        output: emb,
        gelu_stage_max_error: gelu_err,
        max_off_pattern_mass: off,
        attention,
        flagged_columns,
    })
}

fn advance_markers(emb: &mut EmbSeq) -> Result<()> {
    let lay = emb.layout;
    let start = emb.marker(lay.start_dim()).ok_or_else(|| TfError::Layout("start marker lost".into()))?;
    let end = emb.marker(lay.end_dim()).ok_or_else(|| TfError::Layout("end marker lost".into()))?;
    emb.think[start] = true;
    emb.rows.row_mut(start).fill(0.0);
    emb.rows[[start + 1, lay.start_dim()]] = 1.0;
    emb.rows[[end, lay.end_dim()]] = 0.0;
    if end + 1 < lay.positions() {
        emb.rows[[end + 1, lay.end_dim()]] = 1.0;
    }
    Ok(())
}
