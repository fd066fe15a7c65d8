use embed::{unmat, SeqEmbedding};
use mlt_core::Sequence;
use ndarray::Array2;
use surrogate::ContextSet;

use crate::{Result, TfError};

/// Dimension and position bookkeeping for `n`, `d` and `m = L/2` columns.
///
/// Width `2n^2 + 2d + 4`: token `[0, 2n^2)`, level indicator `d`, start/end
/// markers, segment indicator. Positions: `n^2 d` context tokens, then `m`
/// query columns, then `d` padding tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub n: usize,
    pub d: usize,
    pub m: usize,
}

impl Layout {
    pub fn size(&self) -> usize {
        self.n * self.n
    }

    pub fn width(&self) -> usize {
        2 * self.size() + 2 * self.d + 4
    }

    pub fn positions(&self) -> usize {
        self.size() * self.d + self.m + self.d
    }

    /// First position of the second segment.
    pub fn query_start(&self) -> usize {
        self.size() * self.d
    }

    pub fn context_pos(&self, level: usize, r: usize) -> usize {
        level * self.size() + r
    }

    pub fn tok(&self, r: usize) -> usize {
        r
    }

    pub fn tok_hi(&self, r: usize) -> usize {
        self.size() + r
    }

    pub fn level_dim(&self, l: usize) -> usize {
        2 * self.size() + l
    }

    pub fn start_dim(&self) -> usize {
        2 * self.size() + self.d
    }

    pub fn end_dim(&self) -> usize {
        self.start_dim() + 1
    }

    pub fn seg1_dim(&self) -> usize {
        self.start_dim() + 2
    }

    pub fn seg2_dim(&self) -> usize {
        self.start_dim() + 3
    }
}

/// One row per position. `think` marks null positions skipped by attention.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbSeq {
    pub layout: Layout,
    pub rows: Array2<f64>,
    pub think: Vec<bool>,
}

impl EmbSeq {
    pub fn in_query_segment(&self, p: usize) -> bool {
        self.rows[[p, self.layout.seg2_dim()]] == 1.0
    }

    /// Position carrying a marker dimension, if any.
    pub fn marker(&self, dim: usize) -> Option<usize> {
        (0..self.rows.nrows()).find(|&p| self.rows[[p, dim]] == 1.0)
    }
}

pub fn encode_input(ctx: &ContextSet, s: &Sequence) -> Result<EmbSeq> {
    if ctx.n() != s.n() {
        return Err(TfError::Layout(format!("context alphabet {} vs sequence alphabet {}", ctx.n(), s.n())));
    }
    if s.is_empty() || s.len() % 2 != 0 {
        return Err(TfError::Layout(format!("sequence length {} must be even and positive", s.len())));
    }
    let lay = Layout { n: ctx.n(), d: ctx.depth(), m: s.len() / 2 };
    let mut rows = Array2::<f64>::zeros((lay.positions(), lay.width()));
    for level in 0..lay.d {
        for r in 0..lay.size() {
            let p = lay.context_pos(level, r);
            rows[[p, lay.tok(r)]] = 1.0;
            if let Some(row) = ctx.level(level).col(r) {
                rows[[p, lay.tok_hi(row)]] = 1.0;
            }
            rows[[p, lay.level_dim(level)]] = 1.0;
            rows[[p, lay.seg1_dim()]] = 1.0;
        }
    }
    let s0 = lay.query_start();
    for (j, idx) in s.pair_indices().into_iter().enumerate() {
        rows[[s0 + j, lay.tok(idx)]] = 1.0;
    }
    for p in s0..lay.positions() {
        rows[[p, lay.seg2_dim()]] = 1.0;
    }
    rows[[s0, lay.start_dim()]] = 1.0;
    rows[[s0 + lay.m, lay.end_dim()]] = 1.0;
    Ok(EmbSeq { layout: lay, rows, think: vec![false; lay.positions()] })
}

/// Reads the `m` columns from the start marker on: argmax over the first
/// `n^2` token entries. Returns the sequence and the smallest winning entry.
pub fn decode_output(emb: &EmbSeq) -> Result<(Sequence, f64)> {
    let lay = emb.layout;
    let start = emb.marker(lay.start_dim()).ok_or_else(|| TfError::Layout("no start marker".into()))?;
    if start + lay.m > lay.positions() {
        return Err(TfError::Layout("start marker leaves too few positions".into()));
    }
    let mut cols = Vec::with_capacity(lay.m);
    let mut confidence = f64::INFINITY;
    for p in start..start + lay.m {
        if emb.think[p] {
            return Err(TfError::Layout(format!("position {p} is a null position")));
        }
        let row = emb.rows.row(p);
        let token = row.slice(ndarray::s![..lay.size()]);
        let (best, value) = token
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (r, v)| if v > acc.1 { (r, v) } else { acc });
        if token.iter().filter(|&&v| v == value).count() > 1 {
            return Err(TfError::Tie { position: p });
        }
        if value < 0.5 {
            return Err(TfError::LowConfidence { position: p, value });
        }
        confidence = confidence.min(value);
        cols.push(best);
    }
    Ok((unmat(&SeqEmbedding::new(lay.n, cols)?)?, confidence))
}
