use mlt_core::rng::rng_from_seed;
use mlt_core::{intermediates, PhrasebookSet, Sequence};
use rand::Rng as _;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::{Result, SqError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatKind {
    /// Histogram of the character at one position.
    Character,
    /// Histogram of `(s[j+1] - s[j]) mod n`; xor when `n = 2`.
    AdjacentDifference,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniformityRow {
    pub kind: StatKind,
    /// 0-based; for differences, the left position.
    pub position: usize,
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

fn chi_square(counts: &[u64], samples: usize) -> (f64, f64) {
    let expected = samples as f64 / counts.len() as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dist = ChiSquared::new((counts.len() - 1) as f64).expect("positive degrees of freedom");
    (stat, dist.sf(stat))
}

/// Chi-square test of uniformity for each character at `level` (0 = input)
/// and for each circularly adjacent difference, under uniform inputs of
/// length `len`.
pub fn uniformity_probe(
    task: &PhrasebookSet,
    level: usize,
    len: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<UniformityRow>> {
    if level > task.depth() {
        return Err(SqError::InvalidParameter(format!("level {level} beyond depth {}", task.depth())));
    }
    if samples == 0 || len < 2 || len % 2 != 0 {
        return Err(SqError::InvalidParameter("need samples and an even length".into()));
    }
    let n = task.n();
    let mut chars = vec![vec![0u64; n]; len];
    let mut diffs = vec![vec![0u64; n]; len];
    let mut rng = rng_from_seed(seed);
    for _ in 0..samples {
        let s = Sequence::new(n, (0..len).map(|_| rng.gen_range(0..n)).collect())?;
        let trace = intermediates(task, &s)?;
        let at = trace.levels[level].chars();
        for j in 0..len {
            chars[j][at[j]] += 1;
            diffs[j][(at[(j + 1) % len] + n - at[j]) % n] += 1;
        }
    }
    let rows = |kind, hists: Vec<Vec<u64>>| {
        hists.into_iter().enumerate().map(move |(position, h)| {
            let (statistic, p_value) = chi_square(&h, samples);
            UniformityRow { kind, position, statistic, dof: n - 1, p_value }
        })
    };
    Ok(rows(StatKind::Character, chars).chain(rows(StatKind::AdjacentDifference, diffs)).collect())
}
