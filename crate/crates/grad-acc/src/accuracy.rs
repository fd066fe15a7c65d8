use embed::{mat, SeqEmbedding};
use mlt_core::rng::{derive_seed, rng_from_seed};
use mlt_core::{mlt_forward, PhrasebookSet, Sequence};
use ndarray::Array2;
use rand::Rng as _;
use surrogate::{column_argmax, cross_entropy, forward_soft, random_drop, soft_backward_from, ContextSet, DropoutSpec, Weights};

use crate::{GradAccError, Result};

pub const DEFAULT_SCALE: f64 = 25.0;

/// Draws allowed per trial before giving up on getting a dropped column.
pub const RESAMPLE_CAP: usize = 1000;

/// Inputs the batch loss is averaged over.
#[derive(Debug, Clone, PartialEq)]
pub enum Batch {
    /// `size` fresh uniform sequences of length `len` per trial.
    Uniform { size: usize, len: usize },
    /// The same sequences in every trial.
    Fixed(Vec<Sequence>),
}

impl Batch {
    /// Every input of length `len`: all `n^len` sequences.
    pub fn all_inputs(n: usize, len: usize) -> Result<Self> {
        let total = n.checked_pow(len as u32).filter(|&t| t <= 1 << 20).ok_or_else(|| {
            GradAccError::InvalidParameter(format!("{n}^{len} inputs is too many to enumerate"))
        })?;
        let seqs = (0..total)
            .map(|mut x| {
                let chars = (0..len)
                    .map(|_| {
                        let c = x % n;
                        x /= n;
                        c
                    })
                    .collect();
                Sequence::new(n, chars)
            })
            .collect::<std::result::Result<_, _>>()?;
        Ok(Batch::Fixed(seqs))
    }

    fn draw(&self, n: usize, seed: u64) -> Result<Vec<Sequence>> {
        match self {
            Batch::Fixed(seqs) => Ok(seqs.clone()),
            Batch::Uniform { size, len } => {
                let mut rng = rng_from_seed(seed);
                (0..*size).map(|_| Ok(mlt_core::uniform_sequence(n, *len, rng.gen())?)).collect()
            }
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let ok = match self {
            Batch::Uniform { size, len } => *size >= 1 && *len >= 2 && len % 2 == 0,
            Batch::Fixed(seqs) => !seqs.is_empty() && seqs.iter().all(|s| s.n() == n),
        };
        if ok {
            Ok(())
        } else {
            Err(GradAccError::InvalidParameter("batch must be non-empty with even-length sequences".into()))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpaEstimate {
    pub accuracy: f64,
    /// Binomial, `sqrt(a (1 - a) / trials)`.
    pub std_error: f64,
    pub trials: usize,
    /// Dropped first-level columns scored over all trials.
    pub scored_columns: usize,
    /// Dropout draws discarded because no first-level column was dropped.
    pub resampled_trials: usize,
}

fn pairs(task: &PhrasebookSet, seqs: &[Sequence]) -> Result<Vec<(SeqEmbedding, SeqEmbedding)>> {
    seqs.iter().map(|s| Ok((mat(s), mat(&mlt_forward(task, s)?)))).collect()
}

/// Gradient of the mean batch cross entropy w.r.t. `W_1` at `W = 0`.
fn first_level_grad(ctx: &ContextSet, batch: &[(SeqEmbedding, SeqEmbedding)], scale: f64) -> Result<Array2<f64>> {
    let w = Weights::zeros(ctx.n(), ctx.depth());
    let size = ctx.n() * ctx.n();
    let mut total = Array2::<f64>::zeros((size, size));
    for (input, target) in batch {
        let pass = forward_soft(&w, ctx, input, scale)?;
        let (_, grads) = soft_backward_from(&pass, target, 0);
        total += &grads[0];
    }
    Ok(total / batch.len() as f64)
}

/// Whether the negative gradient of column `k` has a unique maximum at `want`.
fn points_at(grad: &Array2<f64>, k: usize, want: usize) -> bool {
    let neg: Vec<f64> = grad.column(k).iter().map(|g| -g).collect();
    let (best, tie) = column_argmax(&neg);
    best == want && !tie
}

/// Mean over trials of the fraction of dropped first-level columns whose
/// negative batch gradient peaks at the correct rule. Each trial draws a
/// fresh dropout (redrawn while no first-level column is dropped) and a
/// fresh batch. Tied maxima count as misses.
pub fn gradient_prediction_accuracy(
    task: &PhrasebookSet,
    spec: &DropoutSpec,
    batch: &Batch,
    trials: usize,
    seed: u64,
    scale: f64,
) -> Result<GpaEstimate> {
    if trials == 0 {
        return Err(GradAccError::InvalidParameter("no trials".into()));
    }
    batch.validate(task.n())?;
    let rules = task.book(0);
    let mut sum = 0.0;
    let mut scored_columns = 0;
    let mut resampled_trials = 0;
    for t in 0..trials {
        let trial_seed = derive_seed(seed, t as u64);
        let mut draw = None;
        for attempt in 1..=RESAMPLE_CAP {
            let (ctx, mask) = random_drop(task, spec, derive_seed(trial_seed, attempt as u64))?;
            if mask[0].iter().any(|&x| x) {
                draw = Some((ctx, mask));
                break;
            }
            resampled_trials += 1;
        }
        let (ctx, mask) = draw.ok_or(GradAccError::NothingDropped(RESAMPLE_CAP))?;
        let dropped: Vec<usize> = (0..mask[0].len()).filter(|&k| mask[0][k]).collect();
        let seqs = batch.draw(task.n(), derive_seed(trial_seed, 0))?;
        let grad = first_level_grad(&ctx, &pairs(task, &seqs)?, scale)?;
        let hits = dropped.iter().filter(|&&k| points_at(&grad, k, rules.map_index(k))).count();
        sum += hits as f64 / dropped.len() as f64;
        scored_columns += dropped.len();
    }
    let accuracy = sum / trials as f64;
    Ok(GpaEstimate {
        accuracy,
        std_error: (accuracy * (1.0 - accuracy) / trials as f64).sqrt(),
        trials,
        scored_columns,
        resampled_trials,
    })
}

/// Argmax of the negative reverse-mode gradient of column `k` of `W_1` at
/// `W = 0`, averaged over `seqs`. `None` on a tie.
pub fn gradient_argmax(task: &PhrasebookSet, ctx: &ContextSet, seqs: &[Sequence], k: usize, scale: f64) -> Result<Option<usize>> {
    let grad = first_level_grad(ctx, &pairs(task, seqs)?, scale)?;
    let neg: Vec<f64> = grad.column(k).iter().map(|g| -g).collect();
    let (best, tie) = column_argmax(&neg);
    Ok((!tie).then_some(best))
}

/// Brute-force argmax of the negative gradient of column `k` of `W_1`, by
/// central differences of the mean batch loss at `W = 0`. `None` on a tie.
pub fn fd_argmax(
    task: &PhrasebookSet,
    ctx: &ContextSet,
    seqs: &[Sequence],
    k: usize,
    scale: f64,
    step: f64,
) -> Result<Option<usize>> {
    let batch = pairs(task, seqs)?;
    let size = task.n() * task.n();
    let loss = |w: &Weights| -> Result<f64> {
        let mut total = 0.0;
        for (input, target) in &batch {
            total += cross_entropy(forward_soft(w, ctx, input, scale)?.output(), target);
        }
        Ok(total / batch.len() as f64)
    };
    let mut neg = Vec::with_capacity(size);
    for r in 0..size {
        let mut plus = Weights::zeros(task.n(), task.depth());
        plus.level_mut(0)[[r, k]] = step;
        let mut minus = Weights::zeros(task.n(), task.depth());
        minus.level_mut(0)[[r, k]] = -step;
        neg.push(-(loss(&plus)? - loss(&minus)?) / (2.0 * step));
    }
    let (best, tie) = column_argmax(&neg);
    Ok((!tie).then_some(best))
}
