use std::fmt::Write as _;

use embed::SeqEmbedding;
use mlt_core::PhrasebookSet;
use surrogate::{context_from, drop_column, effective_matrices, forward_effective, Weights};

use crate::trace::{column_match_fraction, csv_header};
use crate::{Ambiguity, LearnError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub weights: Weights,
    pub forward_passes: usize,
    /// `lengths[i][k]`: forward passes spent on column `k` of level `i`.
    pub lengths: Vec<Vec<usize>>,
}

impl SearchReport {
    /// One row per resolved column in search order. `loss` is the number of
    /// output columns the kept candidate gets wrong (always 0 on success);
    /// `candidates` is the number of forward passes spent on that column.
    pub fn to_csv(&self, task: &PhrasebookSet) -> String {
        let (d, size) = (self.lengths.len(), task.n() * task.n());
        let mut out = csv_header(d);
        out.push_str(",candidates\n");
        let mut w = Weights::zeros(task.n(), d);
        for i in 0..d {
            for k in 0..size {
                let row = (0..size).find(|&r| self.weights.level(i)[[r, k]] == 1.0).unwrap_or(0);
                w.level_mut(i)[[row, k]] = 1.0;
                write!(out, "{},{},{},0", i * size + k + 1, i + 1, k).unwrap();
                for m in column_match_fraction(&w, task) {
                    write!(out, ",{m}").unwrap();
                }
                writeln!(out, ",{}", self.lengths[i][k]).unwrap();
            }
        }
        out
    }
}

/// Column-by-column search: with column `k` of level `i` dropped from the
/// context, try each one-hot candidate for `W_i^(k)` and keep the one that
/// reproduces `target`.
///
/// Since every other rule is supplied by the context, a used column has
/// exactly one matching candidate and an unused one is matched by all of
/// them. So after a hit on candidate 0 a second candidate is tried to tell
/// the two apart; a hit on any later candidate is already unique.
pub fn heuristic_search(task: &PhrasebookSet, input: &SeqEmbedding, target: &SeqEmbedding) -> Result<SearchReport> {
    let (n, d) = (task.n(), task.depth());
    let size = n * n;
    if input.n() != n || target.n() != n || input.num_cols() != target.num_cols() {
        return Err(LearnError::InvalidParameter("input and target must match the task".into()));
    }
    let full = context_from(task);
    let mut weights = Weights::zeros(n, d);
    let mut lengths = vec![vec![0; size]; d];
    let mut passes = 0;
    for i in 0..d {
        for k in 0..size {
            let ctx = drop_column(&full, i, k)?;
            let (mut eff, _) = effective_matrices(&Weights::zeros(n, d), &ctx)?;
            let mut hits = |row: usize, passes: &mut usize| -> Result<bool> {
                eff[i].set_col(k, Some(row));
                *passes += 1;
                Ok(forward_effective(&eff, input)? == *target)
            };
            let start = passes;
            let mut found = None;
            for row in 0..size {
                if hits(row, &mut passes)? {
                    found = Some(row);
                    break;
                }
            }
            let row = match found {
                None => return Err(LearnError::Unresolvable { level: i, column: k, kind: Ambiguity::NoCandidate }),
                Some(0) if hits(1, &mut passes)? => {
                    return Err(LearnError::Unresolvable { level: i, column: k, kind: Ambiguity::SeveralCandidates })
                }
                Some(r) => r,
            };
            weights.level_mut(i)[[row, k]] = 1.0;
            lengths[i][k] = passes - start;
        }
    }
    Ok(SearchReport { weights, forward_passes: passes, lengths })
}
