use embed::{shift_op, SeqEmbedding, StochasticMatrix};
use mlt_core::{tuple_chars, tuple_index};
use ndarray::{Array1, Array2};
use surrogate::forward_continuous;

use crate::{LearnError, Result};

/// Central-difference step of [`oracle_grad`].
pub const ORACLE_STEP: f64 = 1e-4;

/// How the occurrences of the updated tuple in the shifted input split up.
/// `alpha` counts circular runs of consecutive occurrences (each run has two
/// boundary sides), `beta` the remaining occurrences inside runs. On the
/// last level every occurrence counts towards `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GradCaseTally {
    pub alpha: usize,
    pub beta: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradMethod {
    ClosedForm,
    FiniteDifference,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateGrad {
    pub grad: Array1<f64>,
    pub tally: Option<GradCaseTally>,
    pub method: GradMethod,
}

fn check(p: &[StochasticMatrix], input: &SeqEmbedding, target: &SeqEmbedding, level: usize, k: usize) -> Result<()> {
    let n = input.n();
    if p.is_empty() || p.iter().any(|m| m.n() != n) || target.n() != n || target.num_cols() != input.num_cols() {
        return Err(LearnError::InvalidParameter("matrices, input and target disagree".into()));
    }
    if level >= p.len() || k >= n * n {
        return Err(LearnError::InvalidParameter(format!("no column ({level}, {k})")));
    }
    Ok(())
}

/// Squared-error loss of the multilinear model `V_{i+1} = P_i Shift(V_i)`.
fn mse(p: &[Array2<f64>], input: &Array2<f64>, target: &Array2<f64>, n: usize) -> f64 {
    (forward_continuous(p, input, n) - target).mapv(|x| x * x).sum()
}

/// Central finite differences of the squared-error loss with respect to
/// column `k` of `P_level`.
pub fn oracle_grad(
    p: &[StochasticMatrix],
    input: &SeqEmbedding,
    target: &SeqEmbedding,
    level: usize,
    k: usize,
) -> Result<Array1<f64>> {
    check(p, input, target, level, k)?;
    let n = input.n();
    let mut dense: Vec<Array2<f64>> = p.iter().map(StochasticMatrix::to_dense).collect();
    let (x, t) = (input.to_dense(), target.to_dense());
    let mut grad = Array1::zeros(n * n);
    for r in 0..n * n {
        let orig = dense[level][[r, k]];
        dense[level][[r, k]] = orig + ORACLE_STEP;
        let up = mse(&dense, &x, &t, n);
        dense[level][[r, k]] = orig - ORACLE_STEP;
        let down = mse(&dense, &x, &t, n);
        dense[level][[r, k]] = orig;
        grad[r] = (up - down) / (2.0 * ORACLE_STEP);
    }
    Ok(grad)
}

/// Gradient of the squared-error loss with respect to column `k` of `P_level`,
/// evaluated at the given one-hot matrices.
///
/// For two levels the closed forms apply: on the last level the gradient is
/// `2 alpha (P^(k) - P*^(k))`; on the first it is assembled from the run
/// structure of the tuple's occurrences (see [`GradCaseTally`]). The first-level
/// form needs `P_2` to be a permutation and every other used column of `P_1`
/// to agree with the target; when that fails, or for other depths, the
/// finite-difference oracle is returned instead.
pub fn surrogate_grad_col(
    p: &[StochasticMatrix],
    input: &SeqEmbedding,
    target: &SeqEmbedding,
    level: usize,
    k: usize,
) -> Result<SurrogateGrad> {
    check(p, input, target, level, k)?;
    let closed = match (p.len(), level) {
        (2, 1) => last_level(p, input, target, k),
        (2, 0) => first_level(p, input, target, k),
        _ => None,
    };
    Ok(match closed {
        Some((grad, tally)) => SurrogateGrad { grad, tally: Some(tally), method: GradMethod::ClosedForm },
        None => SurrogateGrad {
            grad: oracle_grad(p, input, target, level, k)?,
            tally: None,
            method: GradMethod::FiniteDifference,
        },
    })
}

fn last_level(
    p: &[StochasticMatrix],
    input: &SeqEmbedding,
    target: &SeqEmbedding,
    k: usize,
) -> Option<(Array1<f64>, GradCaseTally)> {
    let n = input.n();
    let mid = p[0].apply(&shift_op(input)).ok()?;
    let shifted = shift_op(&mid);
    let hits: Vec<usize> = (0..shifted.num_cols()).filter(|&j| shifted.cols()[j] == k).collect();
    let mut grad = Array1::zeros(n * n);
    if hits.is_empty() {
        return Some((grad, GradCaseTally { alpha: 0, beta: 0 }));
    }
    let want = target.cols()[hits[0]];
    if hits.iter().any(|&j| target.cols()[j] != want) {
        return None;
    }
    let current = p[1].col(k)?;
    let alpha = hits.len() as f64;
    grad[current] += 2.0 * alpha;
    grad[want] -= 2.0 * alpha;
    Some((grad, GradCaseTally { alpha: hits.len(), beta: 0 }))
}

fn first_level(
    p: &[StochasticMatrix],
    input: &SeqEmbedding,
    target: &SeqEmbedding,
    k: usize,
) -> Option<(Array1<f64>, GradCaseTally)> {
    let n = input.n();
    let size = n * n;
    if !p[1].is_permutation() {
        return None;
    }
    let mut back = vec![0; size];
    for c in 0..size {
        back[p[1].col(c)?] = c;
    }
    let shifted_in = shift_op(input);
    let m = shifted_in.num_cols();
    let current = p[0].apply(&shifted_in).ok()?;

    // The level-2 sequence the target implies: undo P_2, then the shift.
    let wanted_shift: Vec<usize> = target.cols().iter().map(|&t| back[t]).collect();
    let wanted: Vec<usize> = (0..m)
        .map(|j| {
            let (s, _) = tuple_chars(n, wanted_shift[j]);
            let (_, f) = tuple_chars(n, wanted_shift[(j + m - 1) % m]);
            tuple_index(n, f, s)
        })
        .collect();

    let hits: Vec<bool> = shifted_in.cols().iter().map(|&c| c == k).collect();
    let count = hits.iter().filter(|&&h| h).count();
    let mut grad = Array1::zeros(size);
    if count == 0 {
        return Some((grad, GradCaseTally { alpha: 0, beta: 0 }));
    }
    let first = (0..m).find(|&j| hits[j]).unwrap();
    let goal = wanted[first];
    for j in 0..m {
        if hits[j] && wanted[j] != goal || !hits[j] && current.cols()[j] != wanted[j] {
            return None;
        }
    }
    let runs = (0..m).filter(|&j| hits[j] && !hits[(j + m - 1) % m]).count();
    let tally = GradCaseTally { alpha: runs, beta: count - runs };

    let (f, s) = tuple_chars(n, p[0].col(k)?);
    let (f_star, s_star) = tuple_chars(n, goal);
    let (alpha, beta) = (tally.alpha as f64, tally.beta as f64);
    let keep_s = if f == f_star { 1.0 } else { 0.0 };
    let keep_f = if s == s_star { 1.0 } else { 0.0 };
    for x in 0..n {
        for y in 0..n {
            let ind = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
            let boundary = ind(y, s) - ind(y, s_star) + ind(x, f) - ind(x, f_star);
            let interior = ind(y, s) - keep_s * ind(y, s_star) + ind(x, f) - keep_f * ind(x, f_star);
            grad[tuple_index(n, x, y)] = 2.0 * (alpha * boundary + beta * interior);
        }
    }
    Some((grad, tally))
}

#[cfg(test)]
mod tests {
    use super::*;
    use embed::{mat, matrix_of};
    use mlt_core::{mlt_forward, PhrasebookSet, Sequence};

    fn setup(n: usize, seed: u64, chars: Vec<usize>) -> (Vec<StochasticMatrix>, SeqEmbedding, SeqEmbedding) {
        let task = PhrasebookSet::random(n, 2, seed).unwrap();
        let s = Sequence::new(n, chars).unwrap();
        let target = mat(&mlt_forward(&task, &s).unwrap());
        (task.books().iter().map(matrix_of).collect(), mat(&s), target)
    }

    #[test]
    fn correct_column_has_zero_gradient() {
        let (p, v, t) = setup(3, 1, vec![0, 1, 2, 2, 1, 0, 1, 1]);
        for level in 0..2 {
            for k in 0..9 {
                let g = surrogate_grad_col(&p, &v, &t, level, k).unwrap();
                assert_eq!(g.method, GradMethod::ClosedForm);
                assert!(g.grad.iter().all(|&x| x == 0.0));
            }
        }
    }

    #[test]
    fn unused_tuple_gives_zero_tally() {
        let (mut p, v, t) = setup(2, 3, vec![0, 0, 0, 0]);
        // Shifted input uses only tuple (0,0).
        let bumped = Some((p[0].col(3).unwrap() + 1) % 4);
        p[0].set_col(3, bumped);
        let g = surrogate_grad_col(&p, &v, &t, 0, 3).unwrap();
        assert_eq!(g.tally, Some(GradCaseTally { alpha: 0, beta: 0 }));
        assert!(g.grad.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn full_circle_is_all_interior() {
        let (mut p, v, t) = setup(2, 4, vec![1, 1, 1, 1, 1, 1]);
        let k = 3;
        let right = p[0].col(k).unwrap();
        p[0].set_col(k, Some(right ^ 3));
        let g = surrogate_grad_col(&p, &v, &t, 0, k).unwrap();
        assert_eq!(g.tally, Some(GradCaseTally { alpha: 0, beta: 3 }));
        let fd = oracle_grad(&p, &v, &t, 0, k).unwrap();
        assert!((&g.grad - &fd).iter().all(|x| x.abs() < 1e-6));
    }

    #[test]
    fn non_permutation_last_level_falls_back() {
        let (mut p, v, t) = setup(2, 5, vec![0, 1, 1, 0]);
        let twin = p[1].col(1);
        p[1].set_col(0, twin);
        let g = surrogate_grad_col(&p, &v, &t, 0, 2).unwrap();
        assert_eq!(g.method, GradMethod::FiniteDifference);
        assert_eq!(g.tally, None);
    }
}
