use cli::*;
use mlt_core::parse_task;

fn temp_dir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("mlt-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn file<'a>(r: &'a Report, name: &str) -> &'a str {
    &r.files.iter().find(|(n, _)| n == name).unwrap().1
}

#[test]
fn gen_translate_inverse_round_trip() {
    let dir = temp_dir("round");
    let report = gen_task(&GenTaskConfig { n: 3, d: 4, seed: 11 }).unwrap();
    let path = dir.join("task.mlt");
    std::fs::write(&path, file(&report, "task.mlt")).unwrap();
    assert_eq!(parse_task(file(&report, "task.mlt")).unwrap().depth(), 4);
    let task = path.display().to_string();
    let fwd = translate(&TranslateConfig { task: task.clone(), sequence: "ABCCBA".into(), ..Default::default() }).unwrap();
    let back = translate(&TranslateConfig { task: task.clone(), sequence: fwd.summary.clone(), inverse: true, ..Default::default() })
        .unwrap();
    assert_eq!(back.summary, "ABCCBA");
    let trace = translate(&TranslateConfig { task, random: 8, seed: 2, trace: true, ..Default::default() }).unwrap();
    assert_eq!(trace.summary.lines().count(), 5);
}

#[test]
fn translate_rejects_missing_or_double_input() {
    let dir = temp_dir("bad");
    let path = dir.join("task.mlt");
    std::fs::write(&path, file(&gen_task(&GenTaskConfig::default()).unwrap(), "task.mlt")).unwrap();
    let task = path.display().to_string();
    assert!(translate(&TranslateConfig { task: task.clone(), ..Default::default() }).is_err());
    assert!(translate(&TranslateConfig { task: task.clone(), sequence: "AB".into(), random: 4, ..Default::default() }).is_err());
    assert!(translate(&TranslateConfig { task, sequence: "AZ".into(), ..Default::default() }).is_err());
}

#[test]
fn same_seed_same_files() {
    let a = gen_task(&GenTaskConfig { n: 5, d: 2, seed: 4 }).unwrap();
    let b = gen_task(&GenTaskConfig { n: 5, d: 2, seed: 4 }).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, gen_task(&GenTaskConfig { n: 5, d: 2, seed: 5 }).unwrap());
}

#[test]
fn flags_override_file_and_defaults_fill_the_rest() {
    let table = parse_file("[search]\nn = 4\nd = 2\n[sq.decay]\ntrials = 10\n").unwrap();
    let flags = SearchFlags { d: Some(3), ..Default::default() };
    let cfg: SearchConfig = resolve(Some(&table), &["search"], &flags).unwrap();
    assert_eq!(cfg, SearchConfig { n: 4, d: 3, ..Default::default() });
    let decay: DecayConfig = resolve(Some(&table), &["sq", "decay"], &DecayFlags::default()).unwrap();
    assert_eq!((decay.trials, decay.depths.len()), (10, 6));
    let untouched: Gd2Config = resolve(Some(&table), &["gd2"], &Gd2Flags::default()).unwrap();
    assert_eq!(untouched, Gd2Config::default());
}

#[test]
fn config_errors_are_caught_before_running() {
    assert!(parse_file("[search]\nn = ").is_err());
    assert!(parse_file("[serch]\n").is_err());
    assert!(parse_file("[sq.decy]\n").is_err());
    let table = parse_file("[search]\nbogus = 1\n").unwrap();
    assert!(resolve::<SearchConfig>(Some(&table), &["search"], &SearchFlags::default()).is_err());
    let table = parse_file("[search]\nn = \"eight\"\n").unwrap();
    assert!(resolve::<SearchConfig>(Some(&table), &["search"], &SearchFlags::default()).is_err());
}

#[test]
fn csv_header_embeds_the_resolved_config() {
    let r = search(&SearchConfig { n: 3, d: 2, seed: 1, delta: 0.05 }).unwrap();
    let csv = file(&r, "search.csv");
    assert!(csv.starts_with(&format!("# mlt {} search\n# n = 3\n# d = 2\n# seed = 1\n# delta = 0.05\n", env!("CARGO_PKG_VERSION"))));
    assert!(r.ok);
}

#[test]
fn census_summary() {
    let r = sq_census(&CensusConfig::default()).unwrap();
    assert!(r.summary.starts_with("24 maps, 6 families"));
    assert_eq!(file(&r, "census.csv").lines().filter(|l| !l.starts_with('#')).count(), 25);
}

#[test]
fn decay_first_row_is_one_third() {
    let r = sq_decay(&DecayConfig { depths: vec![1, 2], trials: 576, seed: 3 }).unwrap();
    let row = file(&r, "decay.csv").lines().find(|l| l.starts_with("1,")).unwrap();
    assert!(row.starts_with("1,576,0.333333,0.333333,"), "{row}");
    assert!(r.ok);
}

#[test]
fn tfcheck_reports_no_mismatches_and_threads_do_not_change_output() {
    let one = tfcheck(&TfcheckConfig { cases: 40, ..Default::default() }).unwrap();
    let three = tfcheck(&TfcheckConfig { cases: 40, jobs: 3, ..Default::default() }).unwrap();
    assert!(one.ok);
    assert!(one.summary.contains(": 0 mismatches over 40 cases"));
    let strip = |r: &Report| file(r, "tfcheck.csv").lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&one), strip(&three));
    let dumped = tfcheck(&TfcheckConfig { cases: 1, dump: true, in_weights: true, ..Default::default() }).unwrap();
    assert!(file(&dumped, "model.txt").starts_with("TFSIM v1 n=3 d=2"));
}

#[test]
fn gd_soft_writes_trace_and_chart() {
    let r = gd_soft_cmd(&GdSoftConfig { n: 3, d: 2, ..Default::default() }).unwrap();
    assert!(r.ok, "{}", r.summary);
    let csv = file(&r, "gd_soft.csv");
    assert!(csv.lines().any(|l| l == "step,masked_level,masked_col,loss,match_1,match_2"));
    assert_eq!(file(&r, "gd_soft.svg").matches("<polyline").count(), 2);
}

#[test]
fn sequence_glyphs_follow_levels() {
    let dir = temp_dir("glyph");
    let path = dir.join("task.mlt");
    std::fs::write(&path, "MLT v1 d=1 n=2\n0 1 2 3\n").unwrap();
    let r = translate(&TranslateConfig { task: path.display().to_string(), sequence: "AB".into(), ..Default::default() })
        .unwrap();
    // identity book: rotate AB -> BA, rendered in the level-2 alphabet
    assert_eq!(r.summary, "DC");
}
