use mlt_core::rng::rng_from_seed;
use mlt_core::{mlt_forward, uniform_sequence, Phrasebook, PhrasebookSet};
use rand::Rng as _;

use crate::{Result, SqError};

/// Largest exponent `k` for which exact mode enumerates `2^k` inputs.
pub const EXACT_LIMIT_BITS: usize = 24;

/// `|Pr[x = y] - Pr[x != y]| = |1 - 2 mean(x xor y)|` over paired bits.
pub fn correlation(xs: &[u8], ys: &[u8]) -> Result<f64> {
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(SqError::LengthMismatch(xs.len(), ys.len()));
    }
    let differ = xs.iter().zip(ys).filter(|(x, y)| (*x ^ *y) & 1 == 1).count();
    Ok((1.0 - 2.0 * differ as f64 / xs.len() as f64).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationMode {
    /// Every input of length `2d`.
    Exact,
    /// Uniform inputs of length `2d`.
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationEstimate {
    pub value: f64,
    pub mode: CorrelationMode,
    pub samples: u64,
    /// Number of inputs on which the two outputs differ.
    pub disagreements: u64,
    /// Zero in exact mode.
    pub std_error: f64,
}

impl CorrelationEstimate {
    /// In exact mode, whether the correlation is exactly zero.
    pub fn is_zero(&self) -> bool {
        2 * self.disagreements == self.samples
    }
}

/// Every character of every input, one bit per input, packed into words.
/// Input number `x` has character `c` equal to bit `c` of `x`.
pub(crate) struct Sliced {
    words: usize,
    /// Valid-bit mask of the last word (inputs fewer than 64).
    tail: u64,
    chars: Vec<Vec<u64>>,
}

impl Sliced {
    pub(crate) fn all_inputs(len: usize) -> Self {
        let count = 1usize << len;
        let words = count.div_ceil(64);
        let tail = if count >= 64 { u64::MAX } else { (1u64 << count) - 1 };
        let chars = (0..len)
            .map(|c| {
                (0..words)
                    .map(|w| {
                        let mut word = 0u64;
                        for b in 0..64.min(count) {
                            let x = w * 64 + b;
                            word |= (((x >> c) & 1) as u64) << b;
                        }
                        word
                    })
                    .collect()
            })
            .collect();
        Sliced { words, tail, chars }
    }

    /// One shift-and-translate step on every input at once.
    fn step(&self, chars: &[Vec<u64>], book: &Phrasebook) -> Vec<Vec<u64>> {
        let len = chars.len();
        // Masks selecting the minterms whose image has a 1 in output char 1 / 2.
        let hi: Vec<bool> = (0..4).map(|t| book.map_index(t) & 2 != 0).collect();
        let lo: Vec<bool> = (0..4).map(|t| book.map_index(t) & 1 != 0).collect();
        let mut out = vec![vec![0u64; self.words]; len];
        for j in 0..len / 2 {
            let (a, b) = (&chars[(2 * j + 1) % len], &chars[(2 * j + 2) % len]);
            for w in 0..self.words {
                let (x, y) = (a[w], b[w]);
                let minterms = [!x & !y, !x & y, x & !y, x & y];
                let (mut c, mut d) = (0u64, 0u64);
                for t in 0..4 {
                    if hi[t] {
                        c |= minterms[t];
                    }
                    if lo[t] {
                        d |= minterms[t];
                    }
                }
                out[2 * j][w] = c;
                out[2 * j + 1][w] = d;
            }
        }
        out
    }

    pub(crate) fn forward(&self, task: &PhrasebookSet) -> Vec<Vec<u64>> {
        let mut cur = self.chars.clone();
        for book in task.books() {
            cur = self.step(&cur, book);
        }
        cur
    }

    pub(crate) fn disagreements(&self, a: &[u64], b: &[u64]) -> u64 {
        let last = self.words - 1;
        a.iter()
            .zip(b)
            .enumerate()
            .map(|(w, (x, y))| {
                let m = if w == last { self.tail } else { u64::MAX };
                ((x ^ y) & m).count_ones() as u64
            })
            .sum()
    }
}

fn check_pair(a: &PhrasebookSet, b: &PhrasebookSet, position: usize) -> Result<()> {
    if a.n() != 2 || b.n() != 2 {
        return Err(SqError::InvalidParameter("task correlation is defined for n = 2".into()));
    }
    if a.depth() != b.depth() {
        return Err(SqError::InvalidParameter("tasks differ in depth".into()));
    }
    if position >= 2 * a.depth() {
        return Err(SqError::InvalidParameter(format!("position {position} outside length {}", 2 * a.depth())));
    }
    Ok(())
}

/// Correlation of output character `position` (0-based) of two binary tasks
/// over inputs of length `2d`.
pub fn task_correlation(
    a: &PhrasebookSet,
    b: &PhrasebookSet,
    position: usize,
    mode: CorrelationMode,
) -> Result<CorrelationEstimate> {
    check_pair(a, b, position)?;
    let len = 2 * a.depth();
    match mode {
        CorrelationMode::Exact => {
            if len > EXACT_LIMIT_BITS {
                return Err(SqError::TooLarge { bits: len, limit: EXACT_LIMIT_BITS });
            }
            let sliced = Sliced::all_inputs(len);
            let (oa, ob) = (sliced.forward(a), sliced.forward(b));
            let samples = 1u64 << len;
            let disagreements = sliced.disagreements(&oa[position], &ob[position]);
            let value = (samples as f64 - 2.0 * disagreements as f64).abs() / samples as f64;
            Ok(CorrelationEstimate { value, mode, samples, disagreements, std_error: 0.0 })
        }
        CorrelationMode::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(SqError::InvalidParameter("no samples".into()));
            }
            let mut rng = rng_from_seed(seed);
            let mut disagreements = 0u64;
            for _ in 0..samples {
                let s = uniform_sequence(2, len, rng.gen())?;
                let (ya, yb) = (mlt_forward(a, &s)?, mlt_forward(b, &s)?);
                disagreements += (ya.chars()[position] != yb.chars()[position]) as u64;
            }
            let q = disagreements as f64 / samples as f64;
            Ok(CorrelationEstimate {
                value: (1.0 - 2.0 * q).abs(),
                mode,
                samples: samples as u64,
                disagreements,
                std_error: 2.0 * (q * (1.0 - q) / samples as f64).sqrt(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mlt_core::Sequence;

    #[test]
    fn correlation_basics() {
        assert_eq!(correlation(&[0, 1, 1], &[0, 1, 1]).unwrap(), 1.0);
        assert_eq!(correlation(&[0, 1, 1], &[1, 0, 0]).unwrap(), 1.0);
        assert_eq!(correlation(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap(), 0.0);
        assert!(correlation(&[0], &[0, 1]).is_err());
        assert!(correlation(&[], &[]).is_err());
    }

    #[test]
    fn sliced_forward_matches_direct_translation() {
        for d in 1..=4 {
            for seed in 0..5 {
                let task = PhrasebookSet::random(2, d, seed).unwrap();
                let len = 2 * d;
                let sliced = Sliced::all_inputs(len);
                let out = sliced.forward(&task);
                for x in 0..1usize << len {
                    let s = Sequence::new(2, (0..len).map(|c| (x >> c) & 1).collect()).unwrap();
                    let y = mlt_forward(&task, &s).unwrap();
                    for (c, &ch) in y.chars().iter().enumerate() {
                        assert_eq!(((out[c][x / 64] >> (x % 64)) & 1) as usize, ch, "d {d} x {x} c {c}");
                    }
                }
            }
        }
    }
}
