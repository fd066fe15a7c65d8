use rand::seq::SliceRandom;

use crate::rng::{derive_seed, rng_from_seed};
use crate::sequence::{tuple_chars, tuple_index};
use crate::{MltError, Result};

/// A bijection on character pairs, stored as a permutation of `0..n*n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Phrasebook {
    n: usize,
    perm: Vec<usize>,
}

impl Phrasebook {
    pub fn from_perm(n: usize, perm: Vec<usize>) -> Result<Self> {
        if n < 2 {
            return Err(MltError::invalid(format!("alphabet size {n} < 2")));
        }
        let size = n * n;
        if perm.len() != size {
            return Err(MltError::invalid(format!(
                "phrasebook has {} entries, expected {size}",
                perm.len()
            )));
        }
        let mut seen = vec![false; size];
        for &p in &perm {
            if p >= size || seen[p] {
                return Err(MltError::invalid(format!("entry {p} breaks bijectivity")));
            }
            seen[p] = true;
        }
        Ok(Phrasebook { n, perm })
    }

    pub fn identity(n: usize) -> Self {
        Phrasebook { n, perm: (0..n * n).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn map_index(&self, idx: usize) -> usize {
        self.perm[idx]
    }

    pub fn map_pair(&self, a: usize, b: usize) -> (usize, usize) {
        tuple_chars(self.n, self.perm[tuple_index(self.n, a, b)])
    }

    pub fn inverse(&self) -> Phrasebook {
        let mut inv = vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        Phrasebook { n: self.n, perm: inv }
    }
}

/// Uniform permutation of the `n*n` tuples (Fisher-Yates).
pub fn random_phrasebook(n: usize, seed: u64) -> Result<Phrasebook> {
    if n < 2 {
        return Err(MltError::invalid(format!("alphabet size {n} < 2")));
    }
    let mut perm: Vec<usize> = (0..n * n).collect();
    perm.shuffle(&mut rng_from_seed(seed));
    Ok(Phrasebook { n, perm })
}

/// The `d` phrasebooks of one task instance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhrasebookSet {
    n: usize,
    books: Vec<Phrasebook>,
}

impl PhrasebookSet {
    pub fn new(books: Vec<Phrasebook>) -> Result<Self> {
        let n = match books.first() {
            Some(b) => b.n(),
            None => return Err(MltError::invalid("a task needs at least one phrasebook")),
        };
        if books.iter().any(|b| b.n() != n) {
            return Err(MltError::invalid("phrasebooks disagree on alphabet size"));
        }
        Ok(PhrasebookSet { n, books })
    }

    pub fn identity(n: usize, d: usize) -> Result<Self> {
        Self::new((0..d).map(|_| Phrasebook::identity(n)).collect())
    }

    /// Book `i` is drawn from its own derived stream, so prefixes agree across depths.
    pub fn random(n: usize, d: usize, seed: u64) -> Result<Self> {
        let books = (0..d)
            .map(|i| random_phrasebook(n, derive_seed(seed, i as u64)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(books)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.books.len()
    }

    pub fn books(&self) -> &[Phrasebook] {
        &self.books
    }

    pub fn book(&self, level: usize) -> &Phrasebook {
        &self.books[level]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn rejects_non_bijections() {
        assert!(Phrasebook::from_perm(2, vec![0, 1, 1, 3]).is_err());
        assert!(Phrasebook::from_perm(2, vec![0, 1, 2]).is_err());
        assert!(Phrasebook::from_perm(2, vec![0, 1, 2, 4]).is_err());
        assert!(random_phrasebook(1, 0).is_err());
    }

    #[test]
    fn random_books_are_permutations() {
        for seed in 0..50 {
            let pb = random_phrasebook(4, seed).unwrap();
            let mut p = pb.perm().to_vec();
            p.sort_unstable();
            assert_eq!(p, (0..16).collect::<Vec<_>>());
        }
    }

    #[test]
    fn same_seed_same_book() {
        assert_eq!(random_phrasebook(6, 99).unwrap(), random_phrasebook(6, 99).unwrap());
    }

    #[test]
    fn all_24_books_appear_for_n2() {
        let seen: HashSet<Vec<usize>> = (0..2000)
            .map(|s| random_phrasebook(2, s).unwrap().perm().to_vec())
            .collect();
        assert_eq!(seen.len(), 24);
    }

    #[test]
    fn inverse_composes_to_identity() {
        let pb = random_phrasebook(5, 3).unwrap();
        let inv = pb.inverse();
        for i in 0..25 {
            assert_eq!(inv.map_index(pb.map_index(i)), i);
        }
    }

    #[test]
    fn set_rejects_mixed_alphabets() {
        let r = PhrasebookSet::new(vec![Phrasebook::identity(2), Phrasebook::identity(3)]);
        assert!(r.is_err());
        assert!(PhrasebookSet::new(vec![]).is_err());
    }
}
