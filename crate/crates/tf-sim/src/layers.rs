use ndarray::{s, Array1, Array2};

/// `x Phi(x)`.
pub fn gelu(x: f64) -> f64 {
    0.5 * x * (1.0 + libm::erf(x / std::f64::consts::SQRT_2))
}

/// `sqrt(pi/2) (GELU(x+y) - GELU(x) - GELU(y))`, close to `xy` for small inputs.
pub fn gelu_product(x: f64, y: f64) -> f64 {
    (std::f64::consts::PI / 2.0).sqrt() * (gelu(x + y) - gelu(x) - gelu(y))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttnMode {
    /// Attend uniformly to the keys with the largest logit when it beats the
    /// sink; otherwise the row is a no-op.
    HardPattern,
    /// Softmax of `lambda * logits` over allowed keys plus a zero-value sink.
    Saturated { lambda: f64 },
}

/// One relative-attention head. Logits are `q_p1 . k_p2 + biases[p1 - p2]`
/// over earlier non-null positions, and a zero-value sink with logit `sink`
/// absorbs rows with nothing to attend to.
#[derive(Debug, Clone, PartialEq)]
pub struct Head {
    pub query: Array2<f64>,
    pub key: Array2<f64>,
    pub value: Array2<f64>,
    /// `biases[k]` is added when the key sits `k` positions back.
    pub biases: Vec<f64>,
    pub sink: f64,
}

impl Head {
    pub fn zeros(width: usize, sink: f64) -> Self {
        Head {
            query: Array2::zeros((width, width)),
            key: Array2::zeros((width, width)),
            value: Array2::zeros((width, width)),
            biases: Vec::new(),
            sink,
        }
    }

    /// Attention weights (positions x positions) for the rows in `active`.
    pub fn weights(&self, x: &Array2<f64>, think: &[bool], active: &[bool], mode: AttnMode) -> Array2<f64> {
        let q = x.dot(&self.query.t());
        let k = x.dot(&self.key.t());
        let p = x.nrows();
        let mut a = Array2::<f64>::zeros((p, p));
        for p1 in (0..p).filter(|&p1| active[p1]) {
            let keys: Vec<usize> = (0..=p1).filter(|&p2| !think[p2]).collect();
            let logits: Vec<f64> = keys
                .iter()
                .map(|&p2| q.row(p1).dot(&k.row(p2)) + self.biases.get(p1 - p2).copied().unwrap_or(0.0))
                .collect();
            match mode {
                AttnMode::HardPattern => {
                    let best = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    if best > self.sink {
                        let hits: Vec<usize> = (0..keys.len()).filter(|&i| logits[i] == best).collect();
                        for &i in &hits {
                            a[[p1, keys[i]]] = 1.0 / hits.len() as f64;
                        }
                    }
                }
                AttnMode::Saturated { lambda } => {
                    let top = logits.iter().copied().fold(self.sink, f64::max);
                    let exps: Vec<f64> = logits.iter().map(|l| (lambda * (l - top)).exp()).collect();
                    let total: f64 = exps.iter().sum::<f64>() + (lambda * (self.sink - top)).exp();
                    for (i, e) in exps.iter().enumerate() {
                        a[[p1, keys[i]]] = e / total;
                    }
                }
            }
        }
        a
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelAttnLayer {
    pub heads: Vec<Head>,
}

impl RelAttnLayer {
    /// Sum of head outputs, plus each head's weights.
    pub fn apply(&self, x: &Array2<f64>, think: &[bool], active: &[bool], mode: AttnMode) -> (Array2<f64>, Vec<Array2<f64>>) {
        let mut out = Array2::<f64>::zeros(x.dim());
        let mut weights = Vec::with_capacity(self.heads.len());
        for head in &self.heads {
            let a = head.weights(x, think, active, mode);
            out += &a.dot(&x.dot(&head.value.t()));
            weights.push(a);
        }
        (out, weights)
    }
}

/// `outer . GELU(inner . x)`, then optionally each row's first `normalize.0`
/// entries are divided by `sqrt(|.|^2 + normalize.1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpLayer {
    pub inner: Array2<f64>,
    pub outer: Array2<f64>,
    pub normalize: Option<(usize, f64)>,
}

impl MlpLayer {
    pub fn apply_row(&self, x: &Array1<f64>) -> Array1<f64> {
        let hidden = self.inner.dot(x).mapv(gelu);
        let mut y = self.outer.dot(&hidden);
        if let Some((len, eps)) = self.normalize {
            let mut head = y.slice_mut(s![..len]);
            let norm = (head.dot(&head) + eps).sqrt();
            head /= norm;
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gelu_reference_points() {
        assert_eq!(gelu(0.0), 0.0);
        assert!((gelu(1.0) - 0.841_344_746_068_542_9).abs() < 1e-14);
        assert!((gelu(-1.0) + 0.158_655_253_931_457_05).abs() < 1e-15);
    }

    #[test]
    fn product_of_zero_is_exact() {
        assert_eq!(gelu_product(0.0, 0.0), 0.0);
        assert_eq!(gelu_product(0.01, 0.0), 0.0);
    }
}
