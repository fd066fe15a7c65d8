use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cli::*;

/// Multi-level translation experiments.
///
/// Settings come from `--config FILE` (one TOML table per command, e.g.
/// `[search]` or `[sq.decay]`), then flags, then built-in defaults.
#[derive(Parser)]
#[command(name = "mlt", version)]
struct Args {
    /// TOML config file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV, SVG and task files
    #[arg(long, global = true, env = "MLT_OUT_DIR", default_value = "mlt-out")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Random phrasebook set
    GenTask(GenTaskFlags),
    /// Run a task file forward or backward on one sequence
    Translate(TranslateFlags),
    /// Column-by-column search on a coverable input
    Search(SearchFlags),
    /// Two-level surrogate gradient descent
    Gd2(Gd2Flags),
    /// Gradient descent on the softmax model
    GdSoft(GdSoftFlags),
    /// Correlation probes for binary alphabets
    Sq {
        #[command(subcommand)]
        probe: SqCommand,
    },
    /// Gradient prediction accuracy sweep
    Gradacc(GradaccFlags),
    /// Hand-built transformer against the reference translation
    Tfcheck(TfcheckFlags),
}

#[derive(Subcommand)]
enum SqCommand {
    /// The 24 tuple bijections and their families
    Census(CensusFlags),
    /// Nonzero-correlation fraction against depth
    Decay(DecayFlags),
    /// Chi-square tests of intermediate sequences
    Uniformity(UniformityFlags),
}

fn run(args: Args) -> Result<Report> {
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
            Some(parse_file(&text)?)
        }
        None => None,
    };
    let file = file.as_ref();
    match args.command {
        Command::GenTask(f) => gen_task(&resolve(file, &["gen-task"], &f)?),
        Command::Translate(f) => translate(&resolve(file, &["translate"], &f)?),
        Command::Search(f) => search(&resolve(file, &["search"], &f)?),
        Command::Gd2(f) => gd2(&resolve(file, &["gd2"], &f)?),
        Command::GdSoft(f) => gd_soft_cmd(&resolve(file, &["gd-soft"], &f)?),
        Command::Sq { probe: SqCommand::Census(f) } => sq_census(&resolve(file, &["sq", "census"], &f)?),
        Command::Sq { probe: SqCommand::Decay(f) } => sq_decay(&resolve(file, &["sq", "decay"], &f)?),
        Command::Sq { probe: SqCommand::Uniformity(f) } => sq_uniformity(&resolve(file, &["sq", "uniformity"], &f)?),
        Command::Gradacc(f) => gradacc(&resolve(file, &["gradacc"], &f)?),
        Command::Tfcheck(f) => tfcheck(&resolve(file, &["tfcheck"], &f)?),
    }
}

fn write_files(dir: &PathBuf, report: &Report) -> Result<()> {
    if report.files.is_empty() {
        return Ok(());
    }
    let io_err = |path: &PathBuf| {
        let path = path.display().to_string();
        move |source| CliError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    for (name, body) in &report.files {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(io_err(&path))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let dir = args.out_dir.clone();
    match run(args).and_then(|r| write_files(&dir, &r).map(|_| r)) {
        Ok(report) => {
            println!("{}", report.summary);
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
