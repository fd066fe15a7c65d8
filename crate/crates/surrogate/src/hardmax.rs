use embed::StochasticMatrix;
use ndarray::Array2;

/// Column-wise hard max. Ties go to the lowest row and are listed in `tied_cols`.
#[derive(Debug, Clone, PartialEq)]
pub struct HardMax {
    pub matrix: StochasticMatrix,
    pub tied_cols: Vec<usize>,
}

impl HardMax {
    pub fn has_ties(&self) -> bool {
        !self.tied_cols.is_empty()
    }
}

/// Argmax of one column: lowest index wins ties; the flag reports a tie.
pub fn column_argmax<'a>(col: impl IntoIterator<Item = &'a f64>) -> (usize, bool) {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    let mut tie = false;
    for (r, &v) in col.into_iter().enumerate() {
        if v > best_val {
            best = r;
            best_val = v;
            tie = false;
        } else if v == best_val {
            tie = true;
        }
    }
    (best, tie)
}

/// `m` must be square with `n^2` rows.
pub fn hardmax_cols(m: &Array2<f64>, n: usize) -> HardMax {
    assert_eq!(m.dim(), (n * n, n * n), "hardmax expects an n^2 x n^2 matrix");
    let mut cols = Vec::with_capacity(n * n);
    let mut tied_cols = Vec::new();
    for (c, col) in m.columns().into_iter().enumerate() {
        let (r, tie) = column_argmax(col.iter());
        if tie {
            tied_cols.push(c);
        }
        cols.push(Some(r));
    }
    HardMax { matrix: StochasticMatrix::new(n, cols).expect("argmax rows are in range"), tied_cols }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_matrix_ties_to_row_zero() {
        let h = hardmax_cols(&Array2::zeros((4, 4)), 2);
        assert!(h.has_ties());
        assert_eq!(h.tied_cols, vec![0, 1, 2, 3]);
        assert!(h.matrix.cols().iter().all(|&r| r == Some(0)));
    }

    #[test]
    fn identity_is_fixed() {
        let h = hardmax_cols(&Array2::eye(9), 3);
        assert!(!h.has_ties());
        assert_eq!(h.matrix, StochasticMatrix::identity(3));
    }

    #[test]
    fn argmax_ties_and_order() {
        assert_eq!(column_argmax(&[1.0, 3.0, 3.0]), (1, true));
        assert_eq!(column_argmax(&[3.0, 3.0, 4.0]), (2, false));
    }
}
