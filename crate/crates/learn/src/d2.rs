use embed::SeqEmbedding;
use mlt_core::PhrasebookSet;
use surrogate::{context_from, drop_column, effective_matrices, ContextSet, Weights};

use crate::grad::surrogate_grad_col;
use crate::trace::{column_match_fraction, mismatched_columns, GdTrace, TraceRow};
use crate::{LearnError, Result};

/// Squared error between the hard forward pass and the target, counted in
/// mismatched columns (each wrong column contributes 2).
fn hard_loss(eff: &[embed::StochasticMatrix], input: &SeqEmbedding, target: &SeqEmbedding) -> Result<f64> {
    let out = surrogate::forward_effective(eff, input)?;
    Ok(2.0 * out.cols().iter().zip(target.cols()).filter(|(a, b)| a != b).count() as f64)
}

fn step(
    w: &mut Weights,
    ctx: &ContextSet,
    input: &SeqEmbedding,
    target: &SeqEmbedding,
    level: usize,
    k: usize,
) -> Result<f64> {
    let (eff, _) = effective_matrices(w, ctx)?;
    let loss = hard_loss(&eff, input, target)?;
    let g = surrogate_grad_col(&eff, input, target, level, k)?;
    let mut col = w.level_mut(level).column_mut(k);
    col -= &g.grad;
    Ok(loss)
}

/// Layerwise surrogate gradient descent for two levels with unit step size.
///
/// Level 1: for each column `k`, drop `C_1^(k)` and take two steps on
/// `W_1^(k)`, with level 2 supplied by its full context. Level 2: for each
/// column, drop `C_2^(k)` and take one step, with level 1 in full context.
pub fn gd_d2(
    task: &PhrasebookSet,
    input: &SeqEmbedding,
    target: &SeqEmbedding,
    init: &Weights,
) -> Result<(Weights, GdTrace)> {
    if task.depth() != 2 || init.depth() != 2 || init.n() != task.n() {
        return Err(LearnError::InvalidParameter("d=2 descent needs two levels".into()));
    }
    if init.max_abs() >= 0.5 {
        return Err(LearnError::InvalidParameter(format!("initial weights too large: {}", init.max_abs())));
    }
    let size = task.n() * task.n();
    let full = context_from(task);
    let mut w = init.clone();
    let mut trace = GdTrace::default();
    for (level, repeats) in [(0, 2), (1, 1)] {
        for k in 0..size {
            let ctx = drop_column(&full, level, k)?;
            for _ in 0..repeats {
                let loss = step(&mut w, &ctx, input, target, level, k)?;
                trace.rows.push(TraceRow {
                    step: trace.rows.len() + 1,
                    masked_level: level,
                    masked_col: k,
                    loss,
                    matches: column_match_fraction(&w, task),
                });
            }
        }
    }
    let bad = mismatched_columns(&w, task);
    if !bad.is_empty() {
        return Err(LearnError::RecoveryFailed { mismatched: bad });
    }
    Ok((w, trace))
}
