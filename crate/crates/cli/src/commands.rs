use std::fmt::Write as _;

use clap::ValueEnum;
use embed::mat;
use grad_acc::{grad_acc_sweep, sweep_svg, SweepGrid};
use learn::{column_match_fraction, gd_d2, gd_soft, heuristic_search, GdMode, MaskSchedule, SoftGdConfig};
use mlt_core::rng::derive_seed;
use mlt_core::{
    intermediates, mlt_forward, mlt_inverse, parse_task, serialize_phrasebook, uniform_sequence, write_task,
    GlyphTable, PhrasebookSet, Sequence,
};
use serde::{Deserialize, Serialize};
use sq_probe::{
    both_position_census, decay_csv, decay_experiment, enumerate_bijections_n2, map_pair_correlation_census,
    uniformity_probe, StatKind,
};
use surrogate::{context_from, sample_coverable, ContextSet, Weights, DEFAULT_ATTEMPT_CAP};
use tf_sim::{build_transformer, decode_output, dump_model, encode_input, transformer_forward, AttnMode};

use crate::config::header;
use crate::{chart, CliError, Report, Result};

/// A resolved config type with defaults, plus a flag struct where every field
/// is optional so that only the flags actually given override the file.
macro_rules! config {
    ($cfg:ident / $flags:ident { $( #[doc = $doc:literal] $field:ident : $ty:ty = $default:expr, )* }) => {
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
        pub struct $cfg {
            $( pub $field: $ty, )*
        }

        impl Default for $cfg {
            fn default() -> Self {
                $cfg { $( $field: $default, )* }
            }
        }

        #[derive(Debug, Clone, Default, clap::Args, Serialize)]
        #[serde(rename_all = "kebab-case")]
        pub struct $flags {
            $(
                #[arg(long, value_delimiter = ',', help = concat!($doc, " [default: ", stringify!($default), "]"))]
                #[serde(skip_serializing_if = "Option::is_none")]
                pub $field: Option<$ty>,
            )*
        }
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TrainMode {
    Layerwise,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Schedule {
    Rotating,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AttnChoice {
    Hard,
    Saturated,
    Both,
}

fn task_for(n: usize, d: usize, seed: u64) -> Result<PhrasebookSet> {
    Ok(PhrasebookSet::random(n, d, derive_seed(seed, 1))?)
}

fn coverable_pair(task: &PhrasebookSet, delta: f64, seed: u64) -> Result<(Sequence, Sequence, usize)> {
    let sample = sample_coverable(task, delta, derive_seed(seed, 2), DEFAULT_ATTEMPT_CAP)?;
    let target = mlt_forward(task, &sample.sequence)?;
    Ok((sample.sequence, target, sample.attempts))
}

config! {
    GenTaskConfig / GenTaskFlags {
        /// Alphabet size
        n: usize = 4,
        /// Number of levels
        d: usize = 3,
        /// Seed for the phrasebooks
        seed: u64 = 0,
    }
}

/// `task.mlt` in the machine format, and `rules.txt` in glyph form when the
/// default glyph table is large enough.
pub fn gen_task(cfg: &GenTaskConfig) -> Result<Report> {
    let task = PhrasebookSet::random(cfg.n, cfg.d, cfg.seed)?;
    let head = header("gen-task", cfg);
    let mut files = vec![("task.mlt".to_string(), format!("{head}{}", write_task(&task)))];
    if let Ok(glyphs) = GlyphTable::default_for(cfg.n, cfg.d) {
        let mut rules = head;
        for (i, pb) in task.books().iter().enumerate() {
            rules.push_str(serialize_phrasebook(pb, i + 1, &glyphs)?.trim_end());
            rules.push('\n');
        }
        files.push(("rules.txt".to_string(), rules));
    }
    let summary = format!("generated MLT({}, {}) from seed {}", cfg.d, cfg.n, cfg.seed);
    Ok(Report { files, summary, ok: true })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct TranslateConfig {
    pub task: String,
    pub sequence: String,
    pub random: usize,
    pub seed: u64,
    pub inverse: bool,
    pub trace: bool,
}

impl Default for TranslateConfig {
    fn default() -> Self {
        TranslateConfig { task: String::new(), sequence: String::new(), random: 0, seed: 0, inverse: false, trace: false }
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, Default, clap::Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct TranslateFlags {
    /// Task file in the machine format
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub task: Option<String>,
    /// Input sequence as glyphs (integers separated by spaces when n is too large for glyphs)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sequence: Option<String>,
    /// Translate a uniform random sequence of this length instead
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub random: Option<usize>,
    /// Seed for --random [default: 0]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Treat the sequence as an output and recover the input
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub inverse: bool,
    /// Print every level s_1..s_{d+1}
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub trace: bool,
}

/// Glyphs for 1-based alphabet level `level`, or space-separated integers.
struct Render(Option<GlyphTable>);

impl Render {
    fn show(&self, level: usize, s: &Sequence) -> String {
        match &self.0 {
            Some(g) => s.chars().iter().map(|&c| g.glyph(level, c)).collect(),
            None => s.chars().iter().map(usize::to_string).collect::<Vec<_>>().join(" "),
        }
    }

    fn parse(&self, n: usize, level: usize, text: &str) -> Result<Sequence> {
        let chars = match &self.0 {
            Some(g) => text
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| g.lookup(level, c).ok_or_else(|| CliError::Input(format!("{c:?} is not a level-{level} glyph"))))
                .collect::<Result<Vec<_>>>()?,
            None => text
                .split_whitespace()
                .map(|w| w.parse().map_err(|_| CliError::Input(format!("not a character index: {w:?}"))))
                .collect::<Result<Vec<_>>>()?,
        };
        Ok(Sequence::new(n, chars)?)
    }
}

pub fn translate(cfg: &TranslateConfig) -> Result<Report> {
    if cfg.task.is_empty() {
        return Err(CliError::Config("translate needs a task file".into()));
    }
    let text =
        std::fs::read_to_string(&cfg.task).map_err(|source| CliError::Io { path: cfg.task.clone(), source })?;
    let task = parse_task(&text)?;
    let (n, d) = (task.n(), task.depth());
    let render = Render(GlyphTable::default_for(n, d).ok());
    let given_level = if cfg.inverse { d + 1 } else { 1 };
    let given = match (cfg.sequence.is_empty(), cfg.random) {
        (false, 0) => render.parse(n, given_level, &cfg.sequence)?,
        (true, len) if len > 0 => uniform_sequence(n, len, cfg.seed)?,
        _ => return Err(CliError::Config("give exactly one of --sequence and --random".into())),
    };
    let input = if cfg.inverse { mlt_inverse(&task, &given)? } else { given };
    let trace = intermediates(&task, &input)?;
    let mut summary = String::new();
    if cfg.trace {
        for (i, s) in trace.levels.iter().enumerate() {
            writeln!(summary, "{}", render.show(i + 1, s)).unwrap();
        }
    } else if cfg.inverse {
        writeln!(summary, "{}", render.show(1, &input)).unwrap();
    } else {
        writeln!(summary, "{}", render.show(d + 1, &trace.levels[d])).unwrap();
    }
    Ok(Report { files: vec![], summary: summary.trim_end().to_string(), ok: true })
}

config! {
    SearchConfig / SearchFlags {
        /// Alphabet size
        n: usize = 8,
        /// Number of levels
        d: usize = 5,
        /// Seed for the task and the input
        seed: u64 = 0,
        /// Failure probability used to size the coverable input
        delta: f64 = 0.01,
    }
}

pub fn search(cfg: &SearchConfig) -> Result<Report> {
    let task = task_for(cfg.n, cfg.d, cfg.seed)?;
    let (input, target, attempts) = coverable_pair(&task, cfg.delta, cfg.seed)?;
    let report = heuristic_search(&task, &mat(&input), &mat(&target))?;
    let matches = column_match_fraction(&report.weights, &task);
    let size = cfg.n * cfg.n;
    let recovered: usize = matches.iter().map(|m| (m * size as f64).round() as usize).sum();
    let bound = size * size * cfg.d;
    let ok = recovered == size * cfg.d && report.forward_passes <= bound;
    let summary = format!(
        "search MLT({}, {}): recovered {recovered}/{} columns with {} forward passes (bound {bound}); input length {} after {attempts} draw(s)",
        cfg.d,
        cfg.n,
        size * cfg.d,
        report.forward_passes,
        input.len()
    );
    let csv = format!("{}{}", header("search", cfg), report.to_csv(&task));
    Ok(Report { files: vec![("search.csv".into(), csv)], summary, ok })
}

config! {
    Gd2Config / Gd2Flags {
        /// Alphabet size (two levels)
        n: usize = 10,
        /// Seed for the task and the input
        seed: u64 = 0,
        /// Failure probability used to size the coverable input
        delta: f64 = 0.01,
    }
}

pub fn gd2(cfg: &Gd2Config) -> Result<Report> {
    let task = task_for(cfg.n, 2, cfg.seed)?;
    let (input, target, _) = coverable_pair(&task, cfg.delta, cfg.seed)?;
    let (w, trace) = gd_d2(&task, &mat(&input), &mat(&target), &Weights::zeros(cfg.n, 2))?;
    let matches = column_match_fraction(&w, &task);
    let ok = matches.iter().all(|&m| m == 1.0);
    let summary = format!(
        "gd2 MLT(2, {}): column match {:?} after {} updates",
        cfg.n,
        matches,
        trace.rows.len()
    );
    let csv = format!("{}{}", header("gd2", cfg), trace.to_csv(2));
    Ok(Report { files: vec![("gd2.csv".into(), csv)], summary, ok })
}

config! {
    GdSoftConfig / GdSoftFlags {
        /// Alphabet size
        n: usize = 10,
        /// Number of levels
        d: usize = 10,
        /// Seed for the task, the input and the mask draws
        seed: u64 = 0,
        /// Which weights each step updates
        mode: TrainMode = TrainMode::Layerwise,
        /// Order of the masked context columns
        schedule: Schedule = Schedule::Rotating,
        /// Step budget; 0 means 3 d n^2
        steps: usize = 0,
        /// Learning rate
        lr: f64 = 100.0,
        /// Softmax scale
        scale: f64 = 25.0,
        /// Stop at the first step where every level matches
        stop_early: bool = true,
    }
}

pub fn gd_soft_cmd(cfg: &GdSoftConfig) -> Result<Report> {
    let task = task_for(cfg.n, cfg.d, cfg.seed)?;
    let steps = if cfg.steps == 0 { 3 * cfg.d * cfg.n * cfg.n } else { cfg.steps };
    let mode = match cfg.mode {
        TrainMode::Layerwise => GdMode::Layerwise,
        TrainMode::Full => GdMode::FullParam,
    };
    let mut sgd = SoftGdConfig::new(mode, steps);
    sgd.schedule = match cfg.schedule {
        Schedule::Rotating => MaskSchedule::Rotating,
        Schedule::Mixed => MaskSchedule::Mixed,
    };
    sgd.lr = cfg.lr;
    sgd.scale = cfg.scale;
    sgd.seed = derive_seed(cfg.seed, 2);
    sgd.stop_when_matched = cfg.stop_early;
    let (_, trace) = gd_soft(&task, &sgd)?;
    let full = trace.first_full_match();
    let summary = format!(
        "gd-soft MLT({}, {}) {:?}/{:?}: {} steps, final match {:?}, all levels matched {}",
        cfg.d,
        cfg.n,
        cfg.mode,
        cfg.schedule,
        trace.rows.len(),
        trace.final_matches().unwrap_or(&[]),
        full.map_or("never".to_string(), |t| format!("at step {t}"))
    );
    let csv = format!("{}{}", header("gd-soft", cfg), trace.to_csv(cfg.d));
    let svg = chart::trace_svg(&trace, cfg.d);
    Ok(Report { files: vec![("gd_soft.csv".into(), csv), ("gd_soft.svg".into(), svg)], summary, ok: full.is_some() })
}

config! {
    CensusConfig / CensusFlags {}
}

pub fn sq_census(cfg: &CensusConfig) -> Result<Report> {
    let census = enumerate_bijections_n2();
    let mut csv = header("sq census", cfg);
    csv.push_str("map,perm,family,negate_1,negate_2,op_1,op_2\n");
    for (i, m) in census.maps.iter().enumerate() {
        let perm: Vec<String> = m.book.perm().iter().map(usize::to_string).collect();
        writeln!(
            csv,
            "{i},{},{},{},{},{:?},{:?}",
            perm.join(" "),
            m.family + 1,
            m.negate.0 as u8,
            m.negate.1 as u8,
            m.ops.0,
            m.ops.1
        )
        .unwrap();
    }
    let families = (0..6).filter(|&f| census.family(f).len() == 4).count();
    let fixed = map_pair_correlation_census(0, 0);
    let both = both_position_census();
    let summary = format!(
        "{} maps, {families} families; correlation-1 pairs at a fixed position {}/{}, at both positions {}/{}",
        census.maps.len(),
        fixed.perfect,
        fixed.pairs,
        both.perfect,
        both.pairs
    );
    let ok = census.maps.len() == 24 && families == 6 && fixed.perfect * 3 == fixed.pairs;
    Ok(Report { files: vec![("census.csv".into(), csv)], summary, ok })
}

config! {
    DecayConfig / DecayFlags {
        /// Depths to probe
        depths: Vec<usize> = vec![1, 2, 3, 4, 5, 6],
        /// Phrasebook-set pairs per depth
        trials: usize = 20_000,
        /// Seed for the pair draws
        seed: u64 = 0,
    }
}

pub fn sq_decay(cfg: &DecayConfig) -> Result<Report> {
    let rows = decay_experiment(&cfg.depths, cfg.trials, cfg.seed)?;
    let ok = rows.iter().all(|r| r.within_bound(3.0));
    let mut summary = String::from("nonzero-correlation fraction by depth:");
    for r in &rows {
        write!(summary, " d={} {:.4} (bound {:.4})", r.d, r.nonzero_fraction, r.bound).unwrap();
    }
    let csv = format!("{}{}", header("sq decay", cfg), decay_csv(&rows));
    Ok(Report { files: vec![("decay.csv".into(), csv)], summary, ok })
}

config! {
    UniformityConfig / UniformityFlags {
        /// Alphabet size
        n: usize = 3,
        /// Number of levels
        d: usize = 3,
        /// Sequence length
        len: usize = 12,
        /// Sampled sequences per level
        samples: usize = 100_000,
        /// Seed for the task and the samples
        seed: u64 = 0,
    }
}

pub fn sq_uniformity(cfg: &UniformityConfig) -> Result<Report> {
    const P_FLOOR: f64 = 1e-4;
    let task = task_for(cfg.n, cfg.d, cfg.seed)?;
    let mut csv = header("sq uniformity", cfg);
    csv.push_str("level,kind,position,statistic,dof,p_value\n");
    let mut min_p: f64 = 1.0;
    for level in 0..=cfg.d {
        for r in uniformity_probe(&task, level, cfg.len, cfg.samples, derive_seed(cfg.seed, 2))? {
            let kind = match r.kind {
                StatKind::Character => "char",
                StatKind::AdjacentDifference => "diff",
            };
            writeln!(csv, "{},{kind},{},{:.6},{},{:.6}", level + 1, r.position, r.statistic, r.dof, r.p_value).unwrap();
            min_p = min_p.min(r.p_value);
        }
    }
    let summary = format!("smallest chi-square p-value {min_p:.6} (floor {P_FLOOR})");
    Ok(Report { files: vec![("uniformity.csv".into(), csv)], summary, ok: min_p > P_FLOOR })
}

config! {
    GradaccConfig / GradaccFlags {
        /// Alphabet size
        n: usize = 4,
        /// Number of levels
        d: usize = 3,
        /// Length of each batch sequence
        seq_len: usize = 32,
        /// Dropout draws per grid point
        trials: usize = 200,
        /// Seed for the task and every grid point
        seed: u64 = 0,
        /// Softmax scale
        scale: f64 = 25.0,
        /// Drop rates applied to levels 1..k
        drop_rates: Vec<f64> = vec![0.1, 0.3, 0.5, 0.7, 0.9],
        /// Batch sizes
        batches: Vec<usize> = vec![1, 4],
        /// Largest level with dropped columns
        max_levels: Vec<usize> = vec![1, 2, 3],
    }
}

pub fn gradacc(cfg: &GradaccConfig) -> Result<Report> {
    let task = task_for(cfg.n, cfg.d, cfg.seed)?;
    let grid =
        SweepGrid { drop_rates: cfg.drop_rates.clone(), batches: cfg.batches.clone(), max_levels: cfg.max_levels.clone() };
    let report = grad_acc_sweep(&task, &grid, cfg.seq_len, cfg.trials, cfg.seed, cfg.scale)?;
    let summary = format!(
        "gradient prediction accuracy over {} grid points ({} skipped), {} trials each",
        report.rows.len(),
        report.skipped.len(),
        cfg.trials
    );
    let csv = format!("{}{}", header("gradacc", cfg), report.to_csv());
    Ok(Report { files: vec![("gradacc.csv".into(), csv), ("gradacc.svg".into(), sweep_svg(&report))], summary, ok: true })
}

config! {
    TfcheckConfig / TfcheckFlags {
        /// Alphabet size
        n: usize = 3,
        /// Number of levels
        d: usize = 2,
        /// Random (task, sequence) cases
        cases: usize = 200,
        /// Longest sequence; lengths cycle through 2, 4, ..
        max_len: usize = 12,
        /// Seed for the cases
        seed: u64 = 0,
        /// Attention mode(s) to run
        mode: AttnChoice = AttnChoice::Both,
        /// Logit scale of the saturated mode
        lambda: f64 = 30.0,
        /// Plant the rules in the weights and leave the context empty
        in_weights: bool = false,
        /// Worker threads across cases
        jobs: usize = 1,
        /// Also write the weights of the first case's model
        dump: bool = false,
    }
}

struct CaseResult {
    len: usize,
    mode: &'static str,
    matched: bool,
    confidence: f64,
    gelu_error: f64,
    off_mass: f64,
}

fn tf_case(cfg: &TfcheckConfig, case: usize, modes: &[AttnMode]) -> Result<Vec<CaseResult>> {
    let seed = derive_seed(cfg.seed, case as u64);
    let task = PhrasebookSet::random(cfg.n, cfg.d, seed)?;
    let len = 2 * (1 + case % (cfg.max_len / 2));
    let s = uniform_sequence(cfg.n, len, derive_seed(seed, 1))?;
    let expected = mlt_forward(&task, &s)?;
    let (ctx, w) = if cfg.in_weights {
        (ContextSet::empty(cfg.n, cfg.d), Weights::planted(&task))
    } else {
        (context_from(&task), Weights::zeros(cfg.n, cfg.d))
    };
    let emb = encode_input(&ctx, &s)?;
    let base = build_transformer(cfg.n, cfg.d, &w)?;
    let mut out = Vec::new();
    for &mode in modes {
        let (model, name) = match mode {
            AttnMode::HardPattern => (base.clone(), "hard"),
            AttnMode::Saturated { lambda } => (base.clone().saturated(lambda), "saturated"),
        };
        let report = transformer_forward(&model, &emb)?;
        let (matched, confidence) = match decode_output(&report.output) {
            Ok((got, conf)) => (got == expected, conf),
            Err(_) => (false, f64::NAN),
        };
        out.push(CaseResult {
            len,
            mode: name,
            matched,
            confidence,
            gelu_error: report.gelu_stage_max_error,
            off_mass: report.max_off_pattern_mass,
        });
    }
    Ok(out)
}

/// Runs `f` on `0..count` over `jobs` threads; results keep index order.
fn indexed<T: Send>(count: usize, jobs: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let jobs = jobs.clamp(1, count.max(1));
    let mut slots: Vec<Option<T>> = (0..count).map(|_| None).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs)
            .map(|j| {
                let f = &f;
                scope.spawn(move || (j..count).step_by(jobs).map(|i| (i, f(i))).collect::<Vec<_>>())
            })
            .collect();
        for h in handles {
            for (i, v) in h.join().expect("worker panicked") {
                slots[i] = Some(v);
            }
        }
    });
    slots.into_iter().map(|v| v.expect("every index ran")).collect()
}

pub fn tfcheck(cfg: &TfcheckConfig) -> Result<Report> {
    if cfg.max_len < 2 {
        return Err(CliError::Config("max-len must be at least 2".into()));
    }
    let modes: Vec<AttnMode> = match cfg.mode {
        AttnChoice::Hard => vec![AttnMode::HardPattern],
        AttnChoice::Saturated => vec![AttnMode::Saturated { lambda: cfg.lambda }],
        AttnChoice::Both => vec![AttnMode::HardPattern, AttnMode::Saturated { lambda: cfg.lambda }],
    };
    let results = indexed(cfg.cases, cfg.jobs, |case| tf_case(cfg, case, &modes));
    let mut csv = header("tfcheck", cfg);
    csv.push_str("case,mode,len,match,confidence,gelu_stage_error,off_pattern_mass\n");
    let (mut mismatches, mut gelu, mut off, mut conf) = (0, 0.0f64, 0.0f64, f64::INFINITY);
    for (case, rows) in results.into_iter().enumerate() {
        for r in rows? {
            writeln!(
                csv,
                "{case},{},{},{},{:.9},{:.6e},{:.6e}",
                r.mode, r.len, r.matched as u8, r.confidence, r.gelu_error, r.off_mass
            )
            .unwrap();
            mismatches += usize::from(!r.matched);
            gelu = gelu.max(r.gelu_error);
            off = off.max(r.off_mass);
            conf = conf.min(r.confidence);
        }
    }
    let gelu_bound = 10.0 * 100f64.powi(-4);
    let summary = format!(
        "tfcheck n={} d={}: {mismatches} mismatches over {} cases; min confidence {conf:.6}; max off-pattern mass {off:.3e}; max gelu-stage error {gelu:.4e} ({} the 10 N^-4 = {gelu_bound:.0e} bound)",
        cfg.n,
        cfg.d,
        cfg.cases,
        if gelu <= gelu_bound { "within" } else { "above" }
    );
    let mut files = vec![("tfcheck.csv".to_string(), csv)];
    if cfg.dump {
        let w = if cfg.in_weights {
            Weights::planted(&PhrasebookSet::random(cfg.n, cfg.d, derive_seed(cfg.seed, 0))?)
        } else {
            Weights::zeros(cfg.n, cfg.d)
        };
        files.push(("model.txt".to_string(), dump_model(&build_transformer(cfg.n, cfg.d, &w)?)));
    }
    Ok(Report { files, summary, ok: mismatches == 0 })
}
