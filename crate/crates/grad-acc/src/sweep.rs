use std::fmt::Write as _;

use mlt_core::PhrasebookSet;
use surrogate::DropoutSpec;

use crate::accuracy::{gradient_prediction_accuracy, Batch, GpaEstimate};
use crate::{GradAccError, Result};

/// Cartesian grid: every drop rate applies to levels `0..max_level`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub drop_rates: Vec<f64>,
    pub batches: Vec<usize>,
    pub max_levels: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub rates: Vec<f64>,
    pub rate: f64,
    pub batch: usize,
    pub max_level: usize,
    pub estimate: GpaEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub depth: usize,
    pub rows: Vec<SweepRow>,
    /// Grid points that could not be scored.
    pub skipped: Vec<String>,
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for note in &self.skipped {
            writeln!(out, "# skipped: {note}").unwrap();
        }
        let ps: Vec<String> = (1..=self.depth).map(|i| format!("p_{i}")).collect();
        writeln!(out, "{},batch,max_level,trials,accuracy,stderr,resampled_trials", ps.join(",")).unwrap();
        for r in &self.rows {
            let ps: Vec<String> = r.rates.iter().map(|p| format!("{p:.4}")).collect();
            let e = &r.estimate;
            writeln!(
                out,
                "{},{},{},{},{:.6},{:.6},{}",
                ps.join(","),
                r.batch,
                r.max_level,
                e.trials,
                e.accuracy,
                e.std_error,
                e.resampled_trials
            )
            .unwrap();
        }
        out
    }

    /// Rows of one series, in grid order of drop rate.
    pub fn series(&self, batch: usize, max_level: usize) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.batch == batch && r.max_level == max_level).collect()
    }
}

/// Accuracy over the grid with uniform batches of length `seq_len`. Every
/// grid point reuses `seed`, so points differ only in their settings.
pub fn grad_acc_sweep(
    task: &PhrasebookSet,
    grid: &SweepGrid,
    seq_len: usize,
    trials: usize,
    seed: u64,
    scale: f64,
) -> Result<SweepReport> {
    let d = task.depth();
    if let Some(&k) = grid.max_levels.iter().find(|&&k| k == 0 || k > d) {
        return Err(GradAccError::InvalidParameter(format!("max level {k} outside 1..={d}")));
    }
    let mut report = SweepReport { depth: d, rows: Vec::new(), skipped: Vec::new() };
    for &max_level in &grid.max_levels {
        for &batch in &grid.batches {
            for &rate in &grid.drop_rates {
                if rate == 0.0 {
                    report.skipped.push(format!("rate 0, batch {batch}, max level {max_level}: nothing dropped"));
                    continue;
                }
                let rates: Vec<f64> = (0..d).map(|i| if i < max_level { rate } else { 0.0 }).collect();
                let estimate = gradient_prediction_accuracy(
                    task,
                    &DropoutSpec::Rates(rates.clone()),
                    &Batch::Uniform { size: batch, len: seq_len },
                    trials,
                    seed,
                    scale,
                )?;
                report.rows.push(SweepRow { rates, rate, batch, max_level, estimate });
            }
        }
    }
    Ok(report)
}
