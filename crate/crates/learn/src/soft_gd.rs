use embed::{mat, unmat, SeqEmbedding};
use mlt_core::rng::{derive_seed, rng_from_seed};
use mlt_core::{mlt_forward, PhrasebookSet};
use ndarray::Array2;
use rand::Rng as _;
use surrogate::{
    context_from, sample_coverable, soft_backward_from, soft_shift, softmax_cols, SoftPass, Weights,
    DEFAULT_ATTEMPT_CAP, DEFAULT_SCALE,
};

use crate::trace::{column_match_fraction, GdTrace, TraceRow};
use crate::{LearnError, Result};

/// Failure probability used to size the default training input.
pub const DEFAULT_INPUT_DELTA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GdMode {
    /// Only the masked level is updated.
    Layerwise,
    /// Every level is updated each step.
    FullParam,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskSchedule {
    /// Step `t` (1-based) masks level `((t-1) / n^2) mod d`, column `(t-1) mod n^2`.
    Rotating,
    /// A uniformly random `(level, column)` each step.
    Mixed,
    /// Always the same column.
    Fixed { level: usize, column: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SoftGdConfig {
    pub mode: GdMode,
    pub schedule: MaskSchedule,
    pub steps: usize,
    pub lr: f64,
    /// Entrywise clamp after every update; `None` disables it.
    pub clip: Option<(f64, f64)>,
    pub scale: f64,
    pub seed: u64,
    /// End the run at the first step where every level matches fully.
    pub stop_when_matched: bool,
}

impl SoftGdConfig {
    pub fn new(mode: GdMode, steps: usize) -> Self {
        SoftGdConfig {
            mode,
            schedule: MaskSchedule::Rotating,
            steps,
            lr: 100.0,
            clip: Some((0.0, 1.0)),
            scale: DEFAULT_SCALE,
            seed: 0,
            stop_when_matched: true,
        }
    }
}

/// Soft model state kept between steps so that only levels at or above the
/// first changed one are recomputed.
struct CachedPass {
    pass: SoftPass,
    context: Vec<Array2<f64>>,
}

impl CachedPass {
    fn new(task: &PhrasebookSet, input: &SeqEmbedding, scale: f64) -> Self {
        let d = task.depth();
        let pass = SoftPass { n: task.n(), scale, states: vec![input.to_dense()], shifted: vec![], probs: vec![] };
        let mut cache = CachedPass { pass, context: context_from(task).dense_all() };
        cache.pass.states.reserve(d);
        cache
    }

    /// Recompute levels `from..d` with column `mask` of its level zeroed.
    fn refresh(&mut self, w: &Weights, mask: (usize, usize), from: usize) {
        let n = self.pass.n;
        let d = w.depth();
        self.pass.states.truncate(from + 1);
        self.pass.shifted.truncate(from);
        self.pass.probs.truncate(from);
        for i in from..d {
            let mut z = &self.context[i] + w.level(i);
            if i == mask.0 {
                z.column_mut(mask.1).assign(&w.level(i).column(mask.1));
            }
            z *= self.pass.scale;
            let p = softmax_cols(&z);
            let sh = soft_shift(&self.pass.states[i], n);
            self.pass.states.push(p.dot(&sh));
            self.pass.shifted.push(sh);
            self.pass.probs.push(p);
        }
    }
}

/// Gradient descent on the softmax-relaxed model with one context column
/// masked per step, starting from `W = 0`, on a sampled coverable input.
pub fn gd_soft(task: &PhrasebookSet, cfg: &SoftGdConfig) -> Result<(Weights, GdTrace)> {
    let sample = sample_coverable(task, DEFAULT_INPUT_DELTA, derive_seed(cfg.seed, 0), DEFAULT_ATTEMPT_CAP)?;
    gd_soft_on(task, &mat(&sample.sequence), cfg)
}

/// [`gd_soft`] on a caller-supplied input.
pub fn gd_soft_on(task: &PhrasebookSet, input: &SeqEmbedding, cfg: &SoftGdConfig) -> Result<(Weights, GdTrace)> {
    let (n, d) = (task.n(), task.depth());
    let size = n * n;
    if cfg.steps == 0 {
        return Err(LearnError::InvalidParameter("at least one step is required".into()));
    }
    if let MaskSchedule::Fixed { level, column } = cfg.schedule {
        if level >= d || column >= size {
            return Err(LearnError::InvalidParameter(format!("no column ({level}, {column})")));
        }
    }
    let target = mat(&mlt_forward(task, &unmat(input)?)?);
    let mut rng = rng_from_seed(derive_seed(cfg.seed, 1));
    let mut w = Weights::zeros(n, d);
    let mut cache = CachedPass::new(task, input, cfg.scale);
    let mut trace = GdTrace::default();
    let mut dirty = 0;
    let mut prev_mask: Option<(usize, usize)> = None;

    for t in 1..=cfg.steps {
        let mask = match cfg.schedule {
            MaskSchedule::Rotating => (((t - 1) / size) % d, (t - 1) % size),
            MaskSchedule::Mixed => (rng.gen_range(0..d), rng.gen_range(0..size)),
            MaskSchedule::Fixed { level, column } => (level, column),
        };
        if let Some(prev) = prev_mask.filter(|&p| p != mask) {
            dirty = dirty.min(prev.0).min(mask.0);
        }
        prev_mask = Some(mask);
        if dirty < d {
            cache.refresh(&w, mask, dirty);
        }
        let lowest = match cfg.mode {
            GdMode::Layerwise => mask.0,
            GdMode::FullParam => 0,
        };
        let (loss, grads) = soft_backward_from(&cache.pass, &target, lowest);
        for (i, g) in grads.iter().enumerate().skip(lowest) {
            if cfg.mode == GdMode::Layerwise && i != mask.0 {
                continue;
            }
            let wi = w.level_mut(i);
            wi.scaled_add(-cfg.lr, g);
            if let Some((lo, hi)) = cfg.clip {
                wi.mapv_inplace(|x| x.clamp(lo, hi));
            }
        }
        dirty = lowest;
        let matches = column_match_fraction(&w, task);
        let done = matches.iter().all(|&m| m == 1.0);
        trace.rows.push(TraceRow { step: t, masked_level: mask.0, masked_col: mask.1, loss, matches });
        if done && cfg.stop_when_matched {
            trace.stopped_at = Some(t);
            break;
        }
    }
    Ok((w, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use mlt_core::uniform_sequence;
    use surrogate::{drop_column, forward_soft};

    #[test]
    fn cached_pass_matches_fresh_forward() {
        let task = PhrasebookSet::random(3, 4, 2).unwrap();
        let input = mat(&uniform_sequence(3, 40, 2).unwrap());
        let mut w = Weights::zeros(3, 4);
        for i in 0..4 {
            w.level_mut(i)[[i, 2 * i]] = 0.7;
        }
        let mut cache = CachedPass::new(&task, &input, 25.0);
        cache.refresh(&w, (1, 5), 0);
        w.level_mut(2)[[4, 4]] = 0.3;
        cache.refresh(&w, (1, 5), 2);
        let ctx = drop_column(&context_from(&task), 1, 5).unwrap();
        let fresh = forward_soft(&w, &ctx, &input, 25.0).unwrap();
        for (a, b) in cache.pass.states.iter().zip(&fresh.states) {
            assert!((a - b).iter().all(|x| x.abs() < 1e-15));
        }
    }
}
