use itertools::Itertools;

use crate::{GradAccError, Result};

/// Largest sample for which the permutation test enumerates every ordering.
const EXACT_LIMIT: usize = 9;

/// 1-based ranks; tied values share their average rank.
fn ranks(xs: &[f64]) -> Vec<f64> {
    let order: Vec<usize> = (0..xs.len()).sorted_by(|&a, &b| xs[a].total_cmp(&xs[b])).collect();
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            out[o] = avg;
        }
        i = j + 1;
    }
    out
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let m = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / m, b.iter().sum::<f64>() / m);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    if va == 0.0 || vb == 0.0 {
        0.0
    } else {
        cov / (va * vb).sqrt()
    }
}

pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    pearson(&ranks(xs), &ranks(ys))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpearmanTest {
    pub rho: f64,
    /// Fraction of orderings of `ys` with correlation at most `rho`.
    pub p_negative: f64,
    /// Fraction of orderings with correlation at least `rho`.
    pub p_positive: f64,
}

impl SpearmanTest {
    /// Negative association significant at level `alpha`.
    pub fn decreasing(&self, alpha: f64) -> bool {
        self.rho < 0.0 && self.p_negative <= alpha
    }
}

/// One-sided exact permutation test of the rank correlation.
pub fn spearman_test(xs: &[f64], ys: &[f64]) -> Result<SpearmanTest> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(GradAccError::InvalidParameter("need two equal-length samples of size >= 2".into()));
    }
    if xs.len() > EXACT_LIMIT {
        return Err(GradAccError::InvalidParameter(format!("exact test limited to {EXACT_LIMIT} points")));
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let rho = pearson(&rx, &ry);
    let eps = 1e-12;
    let (mut below, mut above, mut total) = (0usize, 0usize, 0usize);
    for perm in ry.iter().copied().permutations(ry.len()) {
        let r = pearson(&rx, &perm);
        below += (r <= rho + eps) as usize;
        above += (r >= rho - eps) as usize;
        total += 1;
    }
    Ok(SpearmanTest { rho, p_negative: below as f64 / total as f64, p_positive: above as f64 / total as f64 })
}
