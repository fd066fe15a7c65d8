use embed::{mat, matrix_of, unmat};
use mlt_core::rng::derive_seed;
use mlt_core::{intermediates, mlt_forward, uniform_sequence, PhrasebookSet, Sequence};
use ndarray::Array2;
use surrogate::{context_from, forward_hard, ContextSet, Weights};
use tf_sim::{
    build_transformer, decode_output, encode_input, gelu_product, transformer_forward, AttnMode, EmbSeq,
    ForwardReport, TransformerModel, DEFAULT_LAMBDA,
};

const CASES: u64 = 200;

fn run(model: &TransformerModel, ctx: &ContextSet, s: &Sequence) -> (ForwardReport, Sequence, f64) {
    let report = transformer_forward(model, &encode_input(ctx, s).unwrap()).unwrap();
    let (out, conf) = decode_output(&report.output).unwrap();
    (report, out, conf)
}

fn master(w: &Weights, ctx: &ContextSet, s: &Sequence) -> Sequence {
    unmat(&forward_hard(w, ctx, &mat(s)).unwrap().output).unwrap()
}

fn in_context_cases(n: usize, d: usize, mode: AttnMode) {
    for case in 0..CASES {
        let seed = derive_seed(1000 * n as u64 + d as u64, case);
        let task = PhrasebookSet::random(n, d, seed).unwrap();
        let len = 2 * (1 + case as usize % 6);
        let s = uniform_sequence(n, len, derive_seed(seed, 1)).unwrap();
        let ctx = context_from(&task);
        let w = Weights::zeros(n, d);
        let mut model = build_transformer(n, d, &w).unwrap();
        if mode != AttnMode::HardPattern {
            model = model.saturated(DEFAULT_LAMBDA);
        }
        let (report, out, conf) = run(&model, &ctx, &s);
        assert_eq!(out, master(&w, &ctx, &s), "n={n} d={d} case {case}");
        assert_eq!(out, mlt_forward(&task, &s).unwrap());
        assert!(conf >= 1.0 - 1e-3, "confidence {conf}");
        assert!(report.max_off_pattern_mass <= 1e-9, "off-pattern {}", report.max_off_pattern_mass);
        assert!(report.flagged_columns.is_empty());
    }
}

#[test]
fn in_context_hard_matches_master() {
    for (n, d) in [(3, 2), (4, 2), (3, 3)] {
        in_context_cases(n, d, AttnMode::HardPattern);
    }
}

#[test]
fn in_context_saturated_matches_master() {
    for (n, d) in [(3, 2), (4, 2), (3, 3)] {
        in_context_cases(n, d, AttnMode::Saturated { lambda: DEFAULT_LAMBDA });
    }
}

fn in_weights_cases(n: usize, d: usize, mode: AttnMode) {
    for case in 0..CASES {
        let seed = derive_seed(7000 + 10 * n as u64 + d as u64, case);
        let task = PhrasebookSet::random(n, d, seed).unwrap();
        let len = 2 * (1 + case as usize % 6);
        let s = uniform_sequence(n, len, derive_seed(seed, 1)).unwrap();
        let ctx = ContextSet::empty(n, d);
        let w = Weights::planted(&task);
        let mut model = build_transformer(n, d, &w).unwrap();
        if mode != AttnMode::HardPattern {
            model = model.saturated(DEFAULT_LAMBDA);
        }
        let (report, out, conf) = run(&model, &ctx, &s);
        assert_eq!(out, master(&w, &ctx, &s), "n={n} d={d} case {case}");
        assert_eq!(out, mlt_forward(&task, &s).unwrap());
        assert!(conf >= 1.0 - 1e-3);
        assert!(report.max_off_pattern_mass <= 1e-9);
    }
}

#[test]
fn in_weights_matches_master_in_both_modes() {
    for (n, d) in [(3, 2), (4, 2), (3, 3)] {
        in_weights_cases(n, d, AttnMode::HardPattern);
        in_weights_cases(n, d, AttnMode::Saturated { lambda: DEFAULT_LAMBDA });
    }
}

/// Half the columns come from the context, the rest from planted weights.
#[test]
fn split_knowledge_matches_master() {
    let (n, d) = (3, 3);
    for case in 0..50 {
        let task = PhrasebookSet::random(n, d, 300 + case).unwrap();
        let full = context_from(&task);
        let mut levels = Vec::new();
        let mut w = Weights::zeros(n, d);
        for i in 0..d {
            let mut m = full.level(i).clone();
            let dense = matrix_of(task.book(i)).to_dense();
            for k in 0..n * n {
                if (k + i + case as usize) % 2 == 0 {
                    m.set_col(k, None);
                    w.level_mut(i).column_mut(k).assign(&dense.column(k));
                }
            }
            levels.push(m);
        }
        let ctx = ContextSet::new(n, levels).unwrap();
        let s = uniform_sequence(n, 8, case).unwrap();
        let model = build_transformer(n, d, &w).unwrap().saturated(DEFAULT_LAMBDA);
        let (report, out, _) = run(&model, &ctx, &s);
        assert!(report.flagged_columns.is_empty());
        assert_eq!(out, mlt_forward(&task, &s).unwrap());
    }
}

#[test]
fn conflicting_column_is_flagged() {
    let task = PhrasebookSet::random(3, 2, 5).unwrap();
    let mut w = Weights::planted(&task);
    let col = w.level(1).column(4).to_owned();
    let moved = (0..9).find(|&r| col[r] == 0.0).unwrap();
    w.level_mut(1).column_mut(4).fill(0.0);
    w.level_mut(1)[[moved, 4]] = 1.0;
    let model = build_transformer(3, 2, &w).unwrap();
    let s = uniform_sequence(3, 4, 1).unwrap();
    let (report, _, _) = run(&model, &context_from(&task), &s);
    assert_eq!(report.flagged_columns, vec![(1, 4)]);
}

/// Expected hard attention target of each head for the rows that carry the
/// sequence, built from the marker positions and the reference trace.
fn expected_targets(emb: &EmbSeq, task: &PhrasebookSet, s: &Sequence, level: usize) -> Vec<Vec<(usize, Option<usize>)>> {
    let lay = emb.layout;
    let start = lay.query_start() + level;
    let end = start + lay.m;
    let shifted = &intermediates(task, s).unwrap().shifted[level];
    let rows = start + 1..=end;
    let prev = rows.clone().map(|p| (p, Some(p - 1))).collect();
    let own: Vec<_> = rows.clone().map(|p| (p, Some(p))).collect();
    let wrap = rows.clone().map(|p| (p, (p == end).then_some(start))).collect();
    let lookup = rows
        .clone()
        .map(|p| {
            let (a, b) = shifted.pair(p - start - 1);
            (p, Some(lay.context_pos(level, a * lay.n + b)))
        })
        .collect();
    vec![prev, own.clone(), wrap, lookup, own]
}

#[test]
fn hard_patterns_are_exact() {
    for (n, d) in [(3, 2), (4, 2), (3, 3)] {
        for case in 0..20 {
            let task = PhrasebookSet::random(n, d, 50 + case).unwrap();
            let s = uniform_sequence(n, 10, case).unwrap();
            let model = build_transformer(n, d, &Weights::zeros(n, d)).unwrap();
            let emb = encode_input(&context_from(&task), &s).unwrap();
            let report = transformer_forward(&model, &emb).unwrap();
            for level in 0..d {
                let expected = expected_targets(&emb, &task, &s, level);
                let heads: Vec<&Array2<f64>> =
                    report.attention[2 * level].iter().chain(&report.attention[2 * level + 1]).collect();
                assert_eq!(heads.len(), expected.len());
                for (h, (weights, rows)) in heads.iter().zip(&expected).enumerate() {
                    for &(p, target) in rows {
                        for q in 0..weights.ncols() {
                            let want = if Some(q) == target { 1.0 } else { 0.0 };
                            assert_eq!(weights[[p, q]], want, "level {level} head {h} row {p} key {q}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn first_segment_is_untouched() {
    let task = PhrasebookSet::random(4, 2, 8).unwrap();
    let s = uniform_sequence(4, 6, 8).unwrap();
    let emb = encode_input(&context_from(&task), &s).unwrap();
    for model in [
        build_transformer(4, 2, &Weights::zeros(4, 2)).unwrap(),
        build_transformer(4, 2, &Weights::zeros(4, 2)).unwrap().saturated(DEFAULT_LAMBDA),
    ] {
        let out = transformer_forward(&model, &emb).unwrap().output;
        let s0 = emb.layout.query_start();
        assert_eq!(out.rows.slice(ndarray::s![..s0, ..]), emb.rows.slice(ndarray::s![..s0, ..]));
    }
}

#[test]
fn model_shape() {
    let model = build_transformer(3, 2, &Weights::zeros(3, 2)).unwrap();
    assert_eq!(model.width(), 26);
    assert_eq!(model.layers.len(), 8);
    assert!(build_transformer(3, 3, &Weights::zeros(3, 2)).is_err());
}

// Reference values from 30-digit arithmetic.
#[test]
fn gelu_product_frozen_values() {
    let frozen = [
        (0.01, 0.01, 0.000_099_988_334_108_295_541_355),
        (0.01, -0.01, -0.000_099_998_333_358_333_039_880),
        (0.5, 0.5, 0.187_849_586_466_132_293_445),
        (1.0, 1.0, 0.340_663_621_430_459_399_758),
        (-0.3, 0.7, -0.192_797_531_138_607_998_706),
    ];
    for (x, y, want) in frozen {
        let got = gelu_product(x, y);
        // The subtraction cancels, so allow a few ulps of the summands.
        let scale = tf_sim::gelu(x + y).abs() + tf_sim::gelu(x).abs() + tf_sim::gelu(y).abs();
        assert!((got - want).abs() <= 8.0 * f64::EPSILON * scale, "({x}, {y}): {got} vs {want}");
    }
    assert_eq!(gelu_product(0.01, 0.0), 0.0);
}

#[test]
fn gelu_stage_error_is_the_small_input_residual() {
    let task = PhrasebookSet::random(3, 2, 2).unwrap();
    let s = uniform_sequence(3, 6, 2).unwrap();
    let model = build_transformer(3, 2, &Weights::zeros(3, 2)).unwrap();
    let (report, _, _) = run(&model, &context_from(&task), &s);
    let residual = 1e4 * gelu_product(0.01, 0.01) - 1.0;
    assert!((residual + 1.166_589_170_446_280_7e-4).abs() < 1e-12, "{residual}");
    // Largest error is on a one-hot entry squared, plus normalization slack.
    assert!((report.gelu_stage_max_error - residual.abs()).abs() < 1e-6, "{}", report.gelu_stage_max_error);
}

#[test]
fn dump_lists_every_layer() {
    let model = build_transformer(3, 2, &Weights::zeros(3, 2)).unwrap().saturated(DEFAULT_LAMBDA);
    let text = tf_sim::dump_model(&model);
    assert!(text.starts_with("TFSIM v1 n=3 d=2 N=100.0 lambda=30.0 mode=saturated\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with("layer ")).count(), 8);
    assert!(text.contains("layer 4 mlp hidden=9 normalize=l2:9:1e-12"));
}

#[test]
fn gelu_product_residual_is_quartic() {
    for &(x, y) in &[(0.01, 0.01), (0.01, -0.01), (0.02, 0.005), (-0.03, 0.01)] {
        let predicted = -(x * x * x * y + 1.5 * x * x * y * y + x * y * y * y) / 3.0;
        let residual = gelu_product(x, y) - x * y;
        assert!((residual - predicted).abs() <= 1e-3 * predicted.abs() + 1e-17, "({x}, {y}): {residual} vs {predicted}");
    }
}

#[test]
fn identity_module_rotates() {
    let task = PhrasebookSet::identity(3, 1).unwrap();
    let s = Sequence::new(3, vec![0, 1, 2, 2, 1, 0]).unwrap();
    let model = build_transformer(3, 1, &Weights::zeros(3, 1)).unwrap();
    let (_, out, _) = run(&model, &context_from(&task), &s);
    assert_eq!(out.chars(), &[1, 2, 2, 1, 0, 0]);
}
