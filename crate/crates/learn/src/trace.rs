use std::fmt::Write as _;

use embed::matrix_of;
use mlt_core::PhrasebookSet;
use surrogate::{hardmax_cols, Weights};

/// One optimizer step. `masked_level` is 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub step: usize,
    pub masked_level: usize,
    pub masked_col: usize,
    /// Loss at the point where the gradient was taken.
    pub loss: f64,
    /// Column-match fraction of every level after the update.
    pub matches: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GdTrace {
    pub rows: Vec<TraceRow>,
    /// Set when a run ended before its step budget because every level matched.
    pub stopped_at: Option<usize>,
}

impl GdTrace {
    /// Number of updates taken on `(level, column)`.
    pub fn updates_on(&self, level: usize, column: usize) -> usize {
        self.rows.iter().filter(|r| r.masked_level == level && r.masked_col == column).count()
    }

    pub fn final_matches(&self) -> Option<&[f64]> {
        self.rows.last().map(|r| r.matches.as_slice())
    }

    /// First step after which every level matched completely.
    pub fn first_full_match(&self) -> Option<usize> {
        self.rows.iter().find(|r| r.matches.iter().all(|&m| m == 1.0)).map(|r| r.step)
    }

    pub fn to_csv(&self, depth: usize) -> String {
        let mut out = csv_header(depth);
        out.push('\n');
        for r in &self.rows {
            write!(out, "{},{},{},{}", r.step, r.masked_level + 1, r.masked_col, r.loss).unwrap();
            for m in &r.matches {
                write!(out, ",{m}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

pub(crate) fn csv_header(depth: usize) -> String {
    let mut h = String::from("step,masked_level,masked_col,loss");
    for i in 1..=depth {
        write!(h, ",match_{i}").unwrap();
    }
    h
}

/// Per level, the fraction of columns where `HardMax(W_i)` equals `Matrix(pi*_i)`.
pub fn column_match_fraction(w: &Weights, task: &PhrasebookSet) -> Vec<f64> {
    mismatched_per_level(w, task)
        .iter()
        .map(|bad| 1.0 - bad.len() as f64 / (w.n() * w.n()) as f64)
        .collect()
}

pub(crate) fn mismatched_per_level(w: &Weights, task: &PhrasebookSet) -> Vec<Vec<usize>> {
    let n = w.n();
    w.levels()
        .iter()
        .zip(task.books())
        .map(|(wi, pb)| {
            let got = hardmax_cols(wi, n).matrix;
            let want = matrix_of(pb);
            (0..n * n).filter(|&k| got.col(k) != want.col(k)).collect()
        })
        .collect()
}

pub(crate) fn mismatched_columns(w: &Weights, task: &PhrasebookSet) -> Vec<(usize, usize)> {
    mismatched_per_level(w, task)
        .into_iter()
        .enumerate()
        .flat_map(|(i, cols)| cols.into_iter().map(move |k| (i, k)))
        .collect()
}
