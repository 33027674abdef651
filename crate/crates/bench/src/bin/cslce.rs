use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cslce_bench::experiment::{generate_dataset, trial_rng};
use cslce_bench::io::{load_labels, write_edge_list, write_labels, write_point_csv};
use cslce_bench::score::score_assignment;
use cslce_bench::{run_experiment, BenchError, ExperimentConfig, Result};

/// Local cluster extraction experiments.
#[derive(Parser)]
#[command(name = "cslce", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one generated dataset as edges.txt, labels.txt (and points.csv
    /// for point clouds).
    Gen {
        #[arg(short, long)]
        config: Option<PathBuf>,
        /// Output directory, created if missing.
        #[arg(short, long)]
        out: PathBuf,
        /// Trial whose random stream draws the dataset.
        #[arg(long, default_value_t = 0)]
        trial: usize,
        /// `--key value` config overrides.
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        overrides: Vec<String>,
    },
    /// Run an experiment and write the result CSV.
    Run {
        #[arg(short, long)]
        config: Option<PathBuf>,
        /// Result file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Trials run concurrently.
        #[arg(short, long, default_value_t = 1)]
        jobs: usize,
        /// `--key value` config overrides.
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        overrides: Vec<String>,
    },
    /// Score a `vertex label` assignment file against ground truth.
    Score {
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        assignment: PathBuf,
    },
}

fn gen(config: Option<PathBuf>, out: PathBuf, trial: usize, overrides: Vec<String>) -> Result<()> {
    let cfg = ExperimentConfig::load(config.as_deref(), &overrides)?;
    let mut rng = trial_rng(cfg.rng_seed, trial);
    let (lg, points) = generate_dataset(&cfg.dataset, &mut rng)?
        .ok_or_else(|| BenchError::Config("gen needs a generator dataset".into()))?;
    std::fs::create_dir_all(&out).map_err(|e| BenchError::io(&out, e))?;
    write_edge_list(out.join("edges.txt"), &lg.graph)?;
    write_labels(out.join("labels.txt"), &lg.labels())?;
    if let Some(pc) = points {
        write_point_csv(out.join("points.csv"), &pc, true)?;
    }
    Ok(())
}

fn run(
    config: Option<PathBuf>,
    output: Option<PathBuf>,
    jobs: usize,
    overrides: Vec<String>,
) -> Result<()> {
    let cfg = ExperimentConfig::load(config.as_deref(), &overrides)?;
    let report = run_experiment(&cfg, jobs)?;
    match output {
        Some(path) => report.write_csv(path)?,
        None => std::io::stdout()
            .write_all(report.to_csv().as_bytes())
            .map_err(|e| BenchError::io("<stdout>", e))?,
    }
    let s = report.summary();
    eprintln!(
        "{} trials ({} failed): jaccard {:.4} ± {:.4}, mean accuracy {:.4} ± {:.4}",
        s.completed + s.failed,
        s.failed,
        s.jaccard.mean,
        s.jaccard.sd,
        s.mean_accuracy.mean,
        s.mean_accuracy.sd
    );
    Ok(())
}

fn score(truth: PathBuf, assignment: PathBuf) -> Result<()> {
    let t = load_labels(&truth)?;
    let a = load_labels(&assignment)?;
    let report = score_assignment(&t, &a).map_err(BenchError::Config)?;
    print!("{}", report.to_csv());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Gen {
            config,
            out,
            trial,
            overrides,
        } => gen(config, out, trial, overrides),
        Command::Run {
            config,
            output,
            jobs,
            overrides,
        } => run(config, output, jobs, overrides),
        Command::Score { truth, assignment } => score(truth, assignment),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
