use mlt_core::rng::derive_seed;
use mlt_core::{intermediates, uniform_sequence, PhrasebookSet, Sequence};

use crate::{Result, SurrogateError};

pub const DEFAULT_ATTEMPT_CAP: usize = 100;

/// True when every level's shifted intermediate uses all `n^2` tuples.
pub fn is_coverable(task: &PhrasebookSet, s: &Sequence) -> Result<bool> {
    let n = task.n();
    if s.len() < 2 * n * n {
        return Ok(false);
    }
    let trace = intermediates(task, s)?;
    Ok(trace.shifted.iter().all(|sh| {
        let mut seen = vec![false; n * n];
        sh.pair_indices().into_iter().for_each(|i| seen[i] = true);
        seen.iter().all(|&x| x)
    }))
}

/// `2 * ceil(n^2 ln(n d / delta))`.
pub fn coverable_length(n: usize, d: usize, delta: f64) -> Result<usize> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(SurrogateError::InvalidParameter(format!("delta {delta} outside (0, 1)")));
    }
    let half = ((n * n) as f64 * ((n * d) as f64 / delta).ln()).ceil();
    Ok(2 * (half as usize).max(1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverableSample {
    pub sequence: Sequence,
    pub attempts: usize,
}

/// Draws uniform inputs of [`coverable_length`] until one is coverable.
pub fn sample_coverable(task: &PhrasebookSet, delta: f64, seed: u64, cap: usize) -> Result<CoverableSample> {
    let len = coverable_length(task.n(), task.depth(), delta)?;
    for attempt in 0..cap {
        let s = uniform_sequence(task.n(), len, derive_seed(seed, attempt as u64))?;
        if is_coverable(task, &s)? {
            return Ok(CoverableSample { sequence: s, attempts: attempt + 1 });
        }
    }
    Err(SurrogateError::SamplingFailure { attempts: cap, len })
}
