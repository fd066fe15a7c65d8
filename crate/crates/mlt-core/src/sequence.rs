use rand::Rng as _;

use crate::rng::rng_from_seed;
use crate::{MltError, Result};

/// Index of the character pair `(a, b)` among the `n*n` tuples.
pub fn tuple_index(n: usize, a: usize, b: usize) -> usize {
    a * n + b
}

/// Inverse of [`tuple_index`].
pub fn tuple_chars(n: usize, idx: usize) -> (usize, usize) {
    (idx / n, idx % n)
}

/// An even-length string over the alphabet `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sequence {
    n: usize,
    chars: Vec<usize>,
}

impl Sequence {
    pub fn new(n: usize, chars: Vec<usize>) -> Result<Self> {
        if n < 2 {
            return Err(MltError::invalid(format!("alphabet size {n} < 2")));
        }
        if chars.is_empty() || chars.len() % 2 != 0 {
            return Err(MltError::invalid(format!(
                "sequence length {} must be even and positive",
                chars.len()
            )));
        }
        if let Some(c) = chars.iter().find(|&&c| c >= n) {
            return Err(MltError::invalid(format!("character {c} outside alphabet of size {n}")));
        }
        Ok(Sequence { n, chars })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    pub fn chars(&self) -> &[usize] {
        &self.chars
    }

    pub fn pair(&self, j: usize) -> (usize, usize) {
        (self.chars[2 * j], self.chars[2 * j + 1])
    }

    /// Tuple indices of the consecutive pairs at positions `(2j, 2j+1)`.
    pub fn pair_indices(&self) -> Vec<usize> {
        self.chars
            .chunks_exact(2)
            .map(|p| tuple_index(self.n, p[0], p[1]))
            .collect()
    }

    pub fn from_pair_indices(n: usize, idx: &[usize]) -> Result<Self> {
        if let Some(i) = idx.iter().find(|&&i| i >= n * n) {
            return Err(MltError::invalid(format!("tuple index {i} outside [0, {})", n * n)));
        }
        let chars = idx
            .iter()
            .flat_map(|&i| {
                let (a, b) = tuple_chars(n, i);
                [a, b]
            })
            .collect();
        Sequence::new(n, chars)
    }

    pub fn rotate_left(&self, k: usize) -> Sequence {
        let mut chars = self.chars.clone();
        chars.rotate_left(k % self.len());
        Sequence { n: self.n, chars }
    }

    pub fn rotate_right(&self, k: usize) -> Sequence {
        let mut chars = self.chars.clone();
        chars.rotate_right(k % self.len());
        Sequence { n: self.n, chars }
    }
}

/// i.i.d. uniform characters, deterministic in `seed`.
pub fn uniform_sequence(n: usize, len: usize, seed: u64) -> Result<Sequence> {
    if len == 0 || len % 2 != 0 {
        return Err(MltError::invalid(format!("sequence length {len} must be even and positive")));
    }
    if n < 2 {
        return Err(MltError::invalid(format!("alphabet size {n} < 2")));
    }
    let mut rng = rng_from_seed(seed);
    let chars = (0..len).map(|_| rng.gen_range(0..n)).collect();
    Sequence::new(n, chars)
}
