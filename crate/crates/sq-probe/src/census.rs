use mlt_core::Phrasebook;

use crate::correlation::correlation;

/// Boolean operator producing one output character from `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Copy1,
    Copy2,
    Xor,
}

impl Op {
    pub fn eval(self, a: u8, b: u8) -> u8 {
        match self {
            Op::Copy1 => a,
            Op::Copy2 => b,
            Op::Xor => a ^ b,
        }
    }
}

/// Output operators of the six representatives, in order.
pub const DELTA_OPS: [(Op, Op); 6] = [
    (Op::Copy1, Op::Copy2),
    (Op::Copy1, Op::Xor),
    (Op::Copy2, Op::Copy1),
    (Op::Copy2, Op::Xor),
    (Op::Xor, Op::Copy1),
    (Op::Xor, Op::Copy2),
];

/// One of the 24 bijections with its decomposition: representative
/// `family` (0-based index into [`DELTA_OPS`]) followed by optional negation
/// of each output character.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapInfo {
    pub book: Phrasebook,
    pub family: usize,
    pub negate: (bool, bool),
    pub ops: (Op, Op),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapCensus {
    pub maps: Vec<MapInfo>,
}

impl MapCensus {
    pub fn family(&self, f: usize) -> Vec<&MapInfo> {
        self.maps.iter().filter(|m| m.family == f).collect()
    }

    /// The unnegated member of family `f`.
    pub fn representative(&self, f: usize) -> &MapInfo {
        self.maps.iter().find(|m| m.family == f && m.negate == (false, false)).expect("every family has a base map")
    }
}

fn book_from_ops(ops: (Op, Op), negate: (bool, bool)) -> Phrasebook {
    let perm = (0..4)
        .map(|t| {
            let (a, b) = ((t >> 1) as u8, (t & 1) as u8);
            let c = ops.0.eval(a, b) ^ negate.0 as u8;
            let d = ops.1.eval(a, b) ^ negate.1 as u8;
            (2 * c + d) as usize
        })
        .collect();
    Phrasebook::from_perm(2, perm).expect("copy/xor pairs with distinct inputs are bijective")
}

/// All 24 permutations of the four tuples in lexicographic order.
pub fn all_bijections_n2() -> Vec<Phrasebook> {
    let mut out = Vec::with_capacity(24);
    let mut perm = vec![0, 1, 2, 3];
    loop {
        out.push(Phrasebook::from_perm(2, perm.clone()).expect("a permutation"));
        // Next lexicographic permutation.
        let Some(i) = (0..3).rev().find(|&i| perm[i] < perm[i + 1]) else { break };
        let j = (i + 1..4).rev().find(|&j| perm[j] > perm[i]).unwrap();
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
    out
}

/// Classifies every bijection on `{0,1}^2` by its copy/xor representative
/// and output negations. Panics if some map had no or several decompositions.
pub fn enumerate_bijections_n2() -> MapCensus {
    let maps = all_bijections_n2()
        .into_iter()
        .map(|book| {
            let mut found = Vec::new();
            for (family, &ops) in DELTA_OPS.iter().enumerate() {
                for negate in [(false, false), (true, false), (false, true), (true, true)] {
                    if book_from_ops(ops, negate) == book {
                        found.push(MapInfo { book: book.clone(), family, negate, ops });
                    }
                }
            }
            assert_eq!(found.len(), 1, "map {:?} decomposes {} ways", book.perm(), found.len());
            found.pop().unwrap()
        })
        .collect();
    MapCensus { maps }
}

fn output_bits(book: &Phrasebook, position: usize) -> Vec<u8> {
    (0..4).map(|t| ((book.map_index(t) >> (1 - position)) & 1) as u8).collect()
}

/// Tallies of exact correlations over all 576 ordered pairs of bijections.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCensus {
    pub pairs: usize,
    pub perfect: usize,
    pub zero: usize,
}

/// Correlation of output character `i` of the first map with character `j`
/// of the second (both 0-based) over the four inputs, for every pair.
pub fn map_pair_correlation_census(i: usize, j: usize) -> PairCensus {
    assert!(i < 2 && j < 2, "output positions are 0 or 1");
    let books = all_bijections_n2();
    let mut census = PairCensus { pairs: 0, perfect: 0, zero: 0 };
    for a in &books {
        for b in &books {
            let c = correlation(&output_bits(a, i), &output_bits(b, j)).expect("equal lengths");
            census.pairs += 1;
            if c == 1.0 {
                census.perfect += 1;
            } else if c == 0.0 {
                census.zero += 1;
            }
        }
    }
    census
}

/// Pairs where both output characters correlate perfectly, either position
/// by position or crosswise.
pub fn both_position_census() -> PairCensus {
    let books = all_bijections_n2();
    let corr = |a: &Phrasebook, b: &Phrasebook, i, j| correlation(&output_bits(a, i), &output_bits(b, j)).unwrap();
    let mut census = PairCensus { pairs: 0, perfect: 0, zero: 0 };
    for a in &books {
        for b in &books {
            census.pairs += 1;
            let straight = corr(a, b, 0, 0) == 1.0 && corr(a, b, 1, 1) == 1.0;
            let crossed = corr(a, b, 0, 1) == 1.0 && corr(a, b, 1, 0) == 1.0;
            if straight || crossed {
                census.perfect += 1;
            } else if (0..2).all(|i| (0..2).all(|j| corr(a, b, i, j) == 0.0)) {
                census.zero += 1;
            }
        }
    }
    census
}
