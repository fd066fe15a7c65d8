use std::collections::{HashMap, HashSet};

use mlt_core::{
    apply_step, intermediates, mlt_forward, mlt_inverse, parse_phrasebook, random_phrasebook,
    serialize_phrasebook, uniform_sequence, GlyphTable, PhrasebookSet, Sequence,
};

fn all_sequences(n: usize, len: usize) -> Vec<Sequence> {
    let total = n.pow(len as u32);
    (0..total)
        .map(|mut code| {
            let chars = (0..len)
                .map(|_| {
                    let c = code % n;
                    code /= n;
                    c
                })
                .collect();
            Sequence::new(n, chars).unwrap()
        })
        .collect()
}

#[test]
fn seed_census_is_uniform_over_24_books() {
    let trials = 100_000u64;
    let mut counts: HashMap<Vec<usize>, u64> = HashMap::new();
    for seed in 0..trials {
        *counts.entry(random_phrasebook(2, seed).unwrap().perm().to_vec()).or_default() += 1;
    }
    assert_eq!(counts.len(), 24);
    let p = 1.0 / 24.0;
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    for (perm, &c) in &counts {
        let freq = c as f64 / trials as f64;
        assert!((freq - p).abs() <= 3.0 * sigma, "{perm:?}: {freq}");
    }
}

#[test]
fn forward_equals_repeated_steps() {
    let task = PhrasebookSet::random(8, 5, 2024).unwrap();
    for seed in 0..50 {
        let s = uniform_sequence(8, 20, seed).unwrap();
        let mut cur = s.clone();
        for pb in task.books() {
            cur = apply_step(pb, &cur).unwrap();
        }
        assert_eq!(mlt_forward(&task, &s).unwrap(), cur);
    }
}

#[test]
fn depth_one_is_a_single_step() {
    let task = PhrasebookSet::random(4, 1, 3).unwrap();
    let s = uniform_sequence(4, 10, 9).unwrap();
    assert_eq!(mlt_forward(&task, &s).unwrap(), apply_step(task.book(0), &s).unwrap());
}

#[test]
fn inverse_round_trips() {
    for &(d, n) in &[(2usize, 2usize), (5, 8), (5, 10)] {
        for case in 0..1000u64 {
            let task = PhrasebookSet::random(n, d, case).unwrap();
            let s = uniform_sequence(n, 2 + 2 * (case as usize % 10), case + 7).unwrap();
            let y = mlt_forward(&task, &s).unwrap();
            assert_eq!(mlt_inverse(&task, &y).unwrap(), s);
            assert_eq!(mlt_forward(&task, &mlt_inverse(&task, &s).unwrap()).unwrap(), s);
        }
    }
}

#[test]
fn forward_is_a_bijection_on_small_inputs() {
    for seed in 0..20 {
        let task = PhrasebookSet::random(2, 2, seed).unwrap();
        for len in [2, 4, 6, 8] {
            let inputs = all_sequences(2, len);
            let outputs: HashSet<Sequence> = inputs.iter().map(|s| mlt_forward(&task, s).unwrap()).collect();
            assert_eq!(outputs.len(), inputs.len());
        }
    }
}

#[test]
fn even_rotations_commute_with_translation() {
    for seed in 0..200u64 {
        let task = PhrasebookSet::random(3, 1 + (seed as usize % 5), seed).unwrap();
        let s = uniform_sequence(3, 12, seed ^ 0xABCD).unwrap();
        let out = mlt_forward(&task, &s).unwrap();
        for k in 0..6 {
            let rotated = s.rotate_left(2 * k);
            assert_eq!(mlt_forward(&task, &rotated).unwrap(), out.rotate_left(2 * k));
        }
    }
}

#[test]
fn trace_matches_forward() {
    let task = PhrasebookSet::random(5, 3, 8).unwrap();
    let s = uniform_sequence(5, 14, 1).unwrap();
    let t = intermediates(&task, &s).unwrap();
    for i in 0..3 {
        assert_eq!(t.levels[i + 1], apply_step(task.book(i), &t.levels[i]).unwrap());
    }
    assert_eq!(t.levels.last().unwrap(), &mlt_forward(&task, &s).unwrap());
}

#[test]
fn rule_text_round_trips() {
    for seed in 0..1000u64 {
        let n = 2 + (seed as usize % 7);
        let d = 3;
        let glyphs = GlyphTable::default_for(n, d).unwrap();
        let pb = random_phrasebook(n, seed).unwrap();
        let level = 1 + (seed as usize % d);
        let text = serialize_phrasebook(&pb, level, &glyphs).unwrap();
        assert_eq!(parse_phrasebook(&text, &glyphs).unwrap(), (pb.clone(), level));

        let mut rules: Vec<&str> = text.split("; ").filter(|r| !r.is_empty()).collect();
        rules.reverse();
        let shuffled = rules.join(";\n");
        assert_eq!(parse_phrasebook(&shuffled, &glyphs).unwrap().0, pb);
    }
}
