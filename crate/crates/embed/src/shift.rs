use mlt_core::{tuple_chars, tuple_index};
use ndarray::{Array2, Axis};

use crate::SeqEmbedding;

pub fn kron(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for ((i, j), &x) in a.indexed_iter() {
        if x != 0.0 {
            let mut block = out.slice_mut(ndarray::s![i * br..(i + 1) * br, j * bc..(j + 1) * bc]);
            block.assign(&(b * x));
        }
    }
    out
}

/// `Q = (I_n (x) 1_n)(1_n (x) I_n)^T`.
pub fn q_matrix(n: usize) -> Array2<f64> {
    let eye = Array2::<f64>::eye(n);
    let ones = Array2::<f64>::ones((n, 1));
    kron(&eye, &ones).dot(&kron(&ones, &eye).t())
}

/// Index-level circular shift: column `j` becomes the tuple formed by the
/// second character of column `j` and the first of column `j+1 (mod M)`.
pub fn shift_op(v: &SeqEmbedding) -> SeqEmbedding {
    let n = v.n();
    let m = v.num_cols();
    let cols = (0..m)
        .map(|j| {
            let (_, b) = tuple_chars(n, v.cols()[j]);
            let (c, _) = tuple_chars(n, v.cols()[(j + 1) % m]);
            tuple_index(n, b, c)
        })
        .collect();
    SeqEmbedding::new(n, cols).expect("shift keeps indices in range")
}

/// Dense form: `Q V^(j) (.) Q^T V^(j+1 mod M)`, evaluated with an explicit `Q`.
pub fn shift_dense(v: &Array2<f64>, q: &Array2<f64>) -> Array2<f64> {
    let m = v.ncols();
    let qv = q.dot(v);
    let qtv = q.t().dot(v);
    let mut out = Array2::zeros(v.dim());
    for j in 0..m {
        let prod = &qv.index_axis(Axis(1), j) * &qtv.index_axis(Axis(1), (j + 1) % m);
        out.index_axis_mut(Axis(1), j).assign(&prod);
    }
    out
}
