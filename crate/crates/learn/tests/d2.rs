use embed::{mat, SeqEmbedding};
use learn::{gd_d2, LearnError};
use mlt_core::rng::rng_from_seed;
use mlt_core::{mlt_forward, random_phrasebook, uniform_sequence, Phrasebook, PhrasebookSet, Sequence};
use ndarray::Array2;
use rand::Rng;
use surrogate::{is_coverable, sample_coverable, Weights, DEFAULT_ATTEMPT_CAP};

fn all_books_n2() -> Vec<Phrasebook> {
    let mut books: Vec<Phrasebook> = Vec::new();
    for seed in 0.. {
        let pb = random_phrasebook(2, seed).unwrap();
        if !books.contains(&pb) {
            books.push(pb);
        }
        if books.len() == 24 {
            break;
        }
    }
    books
}

/// First seeded input of length 32 that is coverable for every pair of books.
fn universal_input(books: &[Phrasebook]) -> Sequence {
    (0..)
        .map(|seed| uniform_sequence(2, 32, seed).unwrap())
        .find(|s| {
            books.iter().all(|b| {
                let task = PhrasebookSet::new(vec![b.clone(), books[0].clone()]).unwrap();
                is_coverable(&task, s).unwrap()
            })
        })
        .unwrap()
}

fn run(task: &PhrasebookSet, s: &Sequence, init: &Weights) -> Result<(Weights, learn::GdTrace), LearnError> {
    let v: SeqEmbedding = mat(s);
    let t = mat(&mlt_forward(task, s).unwrap());
    gd_d2(task, &v, &t, init)
}

fn assert_step_counts(trace: &learn::GdTrace, n: usize) {
    for k in 0..n * n {
        assert_eq!(trace.updates_on(0, k), 2);
        assert_eq!(trace.updates_on(1, k), 1);
    }
    assert_eq!(trace.rows.len(), 3 * n * n);
}

#[test]
fn every_n2_pair_is_recovered_from_one_input() {
    let books = all_books_n2();
    let s = universal_input(&books);
    let mut rng = rng_from_seed(3);
    for (a, b1) in books.iter().enumerate() {
        for b2 in &books {
            let task = PhrasebookSet::new(vec![b1.clone(), b2.clone()]).unwrap();
            assert!(is_coverable(&task, &s).unwrap());
            // Alternate zero and small random starts.
            let init = if a % 2 == 0 {
                Weights::zeros(2, 2)
            } else {
                let mut m = || Array2::from_shape_fn((4, 4), |_| rng.gen_range(-0.49..0.49));
                Weights::new(2, vec![m(), m()]).unwrap()
            };
            let (_, trace) = run(&task, &s, &init).unwrap();
            assert_step_counts(&trace, 2);
            assert_eq!(trace.final_matches(), Some(&[1.0, 1.0][..]));
        }
    }
}

#[test]
fn width_ten_recovers_with_exact_step_counts() {
    for seed in 0..3 {
        let task = PhrasebookSet::random(10, 2, seed).unwrap();
        let s = sample_coverable(&task, 0.01, seed, DEFAULT_ATTEMPT_CAP).unwrap().sequence;
        let (_, trace) = run(&task, &s, &Weights::zeros(10, 2)).unwrap();
        assert_step_counts(&trace, 10);
        assert_eq!(trace.final_matches(), Some(&[1.0, 1.0][..]));
    }
}

#[test]
fn non_coverable_input_fails_with_report() {
    let task = PhrasebookSet::random(3, 2, 1).unwrap();
    let s = Sequence::new(3, vec![2; 12]).unwrap();
    match run(&task, &s, &Weights::zeros(3, 2)) {
        Err(LearnError::RecoveryFailed { mismatched }) => assert!(!mismatched.is_empty()),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn rejects_large_init_and_other_depths() {
    let task = PhrasebookSet::random(2, 2, 1).unwrap();
    let s = uniform_sequence(2, 32, 0).unwrap();
    let mut big = Weights::zeros(2, 2);
    big.level_mut(0)[[0, 0]] = 0.5;
    assert!(matches!(run(&task, &s, &big), Err(LearnError::InvalidParameter(_))));
    let deep = PhrasebookSet::random(2, 3, 1).unwrap();
    assert!(matches!(run(&deep, &s, &Weights::zeros(2, 3)), Err(LearnError::InvalidParameter(_))));
}
