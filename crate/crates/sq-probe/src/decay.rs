use std::fmt::Write as _;

use mlt_core::rng::{derive_seed, rng_from_seed};
use mlt_core::{Phrasebook, PhrasebookSet};
use rand::Rng as _;

use crate::census::all_bijections_n2;
use crate::correlation::{Sliced, EXACT_LIMIT_BITS};
use crate::{Result, SqError};

/// Upper bound on the probability that two random depth-`d` binary tasks
/// have correlated first output characters: `(1/3)(7/9)^(d-1)`.
pub fn decay_bound(d: usize) -> f64 {
    assert!(d >= 1, "depth starts at 1");
    (7.0f64 / 9.0).powi(d as i32 - 1) / 3.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayRow {
    pub d: usize,
    pub trials: u64,
    pub nonzero: u64,
    pub nonzero_fraction: f64,
    pub bound: f64,
    /// Binomial standard error at the bound, `sqrt(bound (1 - bound) / trials)`.
    pub sigma: f64,
    /// Every ordered pair of tasks was enumerated.
    pub exhaustive: bool,
}

impl DecayRow {
    pub fn within_bound(&self, sigmas: f64) -> bool {
        self.nonzero_fraction <= self.bound + sigmas * self.sigma
    }
}

pub fn decay_csv(rows: &[DecayRow]) -> String {
    let mut out = String::from("d,trials,nonzero_fraction,bound,sigma\n");
    for r in rows {
        writeln!(out, "{},{},{:.6},{:.6},{:.6}", r.d, r.trials, r.nonzero_fraction, r.bound, r.sigma).unwrap();
    }
    out
}

/// First output character of `task` on every input of length `2d`.
fn first_char(sliced: &Sliced, task: &PhrasebookSet) -> Vec<u64> {
    sliced.forward(task).swap_remove(0)
}

fn is_nonzero(sliced: &Sliced, samples: u64, a: &[u64], b: &[u64]) -> bool {
    2 * sliced.disagreements(a, b) != samples
}

/// All tasks of depth `d` over the 24 binary phrasebooks, in mixed-radix order.
fn all_tasks(books: &[Phrasebook], d: usize) -> Vec<PhrasebookSet> {
    let total = books.len().pow(d as u32);
    (0..total)
        .map(|mut k| {
            let mut chosen = Vec::with_capacity(d);
            for _ in 0..d {
                chosen.push(books[k % books.len()].clone());
                k /= books.len();
            }
            PhrasebookSet::new(chosen).expect("same alphabet")
        })
        .collect()
}

/// For each depth, the fraction of random task pairs whose first output
/// characters have nonzero exact correlation over all `2^(2d)` inputs.
/// Depths where every ordered pair fits in `pair_trials` are enumerated
/// exhaustively instead of sampled.
pub fn decay_experiment(depths: &[usize], pair_trials: usize, seed: u64) -> Result<Vec<DecayRow>> {
    if pair_trials == 0 {
        return Err(SqError::InvalidParameter("no pair trials".into()));
    }
    let books = all_bijections_n2();
    depths
        .iter()
        .map(|&d| {
            if d == 0 {
                return Err(SqError::InvalidParameter("depth 0".into()));
            }
            if 2 * d > EXACT_LIMIT_BITS {
                return Err(SqError::TooLarge { bits: 2 * d, limit: EXACT_LIMIT_BITS });
            }
            let sliced = Sliced::all_inputs(2 * d);
            let samples = 1u64 << (2 * d);
            let task_count = 24f64.powi(d as i32);
            let exhaustive = task_count * task_count <= pair_trials as f64;
            let (trials, nonzero) = if exhaustive {
                let outs: Vec<Vec<u64>> = all_tasks(&books, d).iter().map(|t| first_char(&sliced, t)).collect();
                let nonzero = outs
                    .iter()
                    .flat_map(|a| outs.iter().map(move |b| (a, b)))
                    .filter(|(a, b)| is_nonzero(&sliced, samples, a, b))
                    .count();
                ((outs.len() * outs.len()) as u64, nonzero as u64)
            } else {
                let mut rng = rng_from_seed(derive_seed(seed, d as u64));
                let mut nonzero = 0u64;
                for _ in 0..pair_trials {
                    let a = PhrasebookSet::random(2, d, rng.gen())?;
                    let b = PhrasebookSet::random(2, d, rng.gen())?;
                    nonzero += is_nonzero(&sliced, samples, &first_char(&sliced, &a), &first_char(&sliced, &b)) as u64;
                }
                (pair_trials as u64, nonzero)
            };
            let bound = decay_bound(d);
            Ok(DecayRow {
                d,
                trials,
                nonzero,
                nonzero_fraction: nonzero as f64 / trials as f64,
                bound,
                sigma: (bound * (1.0 - bound) / trials as f64).sqrt(),
                exhaustive,
            })
        })
        .collect()
}
