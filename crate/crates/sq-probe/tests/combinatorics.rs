use mlt_core::{mlt_forward, Phrasebook, PhrasebookSet, Sequence};
use sq_probe::*;

fn bits_of(book: &Phrasebook) -> Vec<(usize, usize)> {
    (0..4).map(|t| book.map_pair(t >> 1, t & 1)).collect()
}

#[test]
fn census_has_six_families_of_four() {
    let census = enumerate_bijections_n2();
    assert_eq!(census.maps.len(), 24);
    for f in 0..6 {
        let family = census.family(f);
        assert_eq!(family.len(), 4);
        // Mirror closure: negating either output character stays in the family.
        let base = census.representative(f);
        let mut negations: Vec<_> = family.iter().map(|m| m.negate).collect();
        negations.sort();
        assert_eq!(negations, vec![(false, false), (false, true), (true, false), (true, true)]);
        for m in family {
            for t in 0..4 {
                let (c, d) = base.book.map_pair(t >> 1, t & 1);
                assert_eq!(m.book.map_pair(t >> 1, t & 1), (c ^ m.negate.0 as usize, d ^ m.negate.1 as usize));
            }
        }
    }
}

#[test]
fn representatives_follow_the_truth_table() {
    let census = enumerate_bijections_n2();
    let rows: Vec<Vec<(usize, usize)>> = (0..6).map(|f| bits_of(&census.representative(f).book)).collect();
    assert_eq!(rows[0], vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
    assert_eq!(rows[1], vec![(0, 0), (0, 1), (1, 1), (1, 0)]);
    assert_eq!(rows[2], vec![(0, 0), (1, 0), (0, 1), (1, 1)]);
    assert_eq!(rows[3], vec![(0, 0), (1, 1), (0, 1), (1, 0)]);
    assert_eq!(rows[4], vec![(0, 0), (1, 0), (1, 1), (0, 1)]);
    assert_eq!(rows[5], vec![(0, 0), (1, 1), (1, 0), (0, 1)]);
    assert_eq!(census.representative(5).ops, (Op::Xor, Op::Copy2));
}

#[test]
fn fixed_position_pairs_split_one_third_perfect() {
    for i in 0..2 {
        for j in 0..2 {
            let c = map_pair_correlation_census(i, j);
            assert_eq!(c.pairs, 576);
            assert_eq!(c.perfect, 192, "({i},{j})");
            assert_eq!(c.perfect + c.zero, 576, "only 0 and 1 occur");
        }
    }
}

#[test]
fn both_positions_perfect_in_one_third() {
    let c = both_position_census();
    assert_eq!((c.pairs, c.perfect), (576, 192));
}

#[test]
fn exact_correlation_matches_naive_enumeration() {
    for d in 1..=3 {
        for seed in 0..6 {
            let a = PhrasebookSet::random(2, d, seed).unwrap();
            let b = PhrasebookSet::random(2, d, 100 + seed).unwrap();
            for p in [0, 2 * d - 1] {
                let est = task_correlation(&a, &b, p, CorrelationMode::Exact).unwrap();
                let (mut xs, mut ys) = (Vec::new(), Vec::new());
                for x in 0..1usize << (2 * d) {
                    let s = Sequence::new(2, (0..2 * d).map(|c| (x >> c) & 1).collect()).unwrap();
                    xs.push(mlt_forward(&a, &s).unwrap().chars()[p] as u8);
                    ys.push(mlt_forward(&b, &s).unwrap().chars()[p] as u8);
                }
                assert_eq!(est.value, correlation(&xs, &ys).unwrap());
                assert_eq!(est.samples, 1 << (2 * d));
            }
        }
    }
}

#[test]
fn identical_tasks_correlate_fully() {
    let a = PhrasebookSet::random(2, 4, 3).unwrap();
    let est = task_correlation(&a, &a, 0, CorrelationMode::Exact).unwrap();
    assert_eq!(est.value, 1.0);
    let mc = task_correlation(&a, &a, 0, CorrelationMode::MonteCarlo { samples: 200, seed: 1 }).unwrap();
    assert_eq!(mc.value, 1.0);
}

#[test]
fn monte_carlo_tracks_exact_value() {
    let a = PhrasebookSet::random(2, 3, 5).unwrap();
    let b = PhrasebookSet::random(2, 3, 6).unwrap();
    let exact = task_correlation(&a, &b, 1, CorrelationMode::Exact).unwrap();
    let mc = task_correlation(&a, &b, 1, CorrelationMode::MonteCarlo { samples: 20_000, seed: 2 }).unwrap();
    assert!((mc.value - exact.value).abs() <= 4.0 * mc.std_error.max(1e-3));
}

#[test]
fn exact_mode_refuses_large_inputs_and_wide_alphabets() {
    let big = PhrasebookSet::random(2, 13, 0).unwrap();
    assert!(matches!(
        task_correlation(&big, &big, 0, CorrelationMode::Exact),
        Err(SqError::TooLarge { bits: 26, limit: 24 })
    ));
    let wide = PhrasebookSet::random(3, 1, 0).unwrap();
    assert!(task_correlation(&wide, &wide, 0, CorrelationMode::Exact).is_err());
}

#[test]
fn depth_one_is_exactly_one_third() {
    let rows = decay_experiment(&[1], 576, 0).unwrap();
    assert!(rows[0].exhaustive);
    assert_eq!((rows[0].trials, rows[0].nonzero), (576, 192));
}

#[test]
fn decay_stays_under_bound_and_shrinks() {
    let rows = decay_experiment(&[1, 2, 3, 4], 20_000, 7).unwrap();
    for r in &rows {
        assert!(r.within_bound(3.0), "{r:?}");
    }
    for pair in rows.windows(2) {
        let slack = 3.0 * (pair[0].sigma.powi(2) + pair[1].sigma.powi(2)).sqrt();
        assert!(pair[1].nonzero_fraction <= pair[0].nonzero_fraction + slack, "{pair:?}");
    }
    let csv = decay_csv(&rows);
    assert!(csv.starts_with("d,trials,nonzero_fraction,bound,sigma\n1,576,0.333333,0.333333,"));
    assert_eq!(rows, decay_experiment(&[1, 2, 3, 4], 20_000, 7).unwrap());
}

#[test]
fn intermediate_characters_look_uniform() {
    let task = PhrasebookSet::random(2, 3, 12).unwrap();
    for level in 0..=3 {
        let rows = uniformity_probe(&task, level, 8, 100_000, level as u64).unwrap();
        assert_eq!(rows.len(), 16);
        for r in rows {
            assert!(r.p_value > 1e-4, "level {level} {r:?}");
        }
    }
    let wide = PhrasebookSet::random(4, 2, 12).unwrap();
    for r in uniformity_probe(&wide, 2, 10, 50_000, 3).unwrap() {
        assert!(r.p_value > 1e-4, "{r:?}");
    }
}
