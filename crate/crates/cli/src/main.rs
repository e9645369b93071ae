use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use ffbandit::harness::{
    aggregate, final_rows, write_bounds_file, write_records_file, write_summary_file, Experiment,
    ExperimentConfig,
};
use ffbandit::{Error, PolicyKind};

/// Run a seeded feature-feedback bandit experiment and write regret CSVs.
#[derive(Debug, Parser)]
#[command(name = "ffbandit", version)]
struct Args {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; receives records.csv and summary.csv.
    #[arg(long)]
    out: PathBuf,
    /// Overrides base_seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated subset of the configured algorithms to run.
    #[arg(long, value_delimiter = ',')]
    algorithms: Option<Vec<String>>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Also write bounds.csv with the theoretical regret bounds.
    #[arg(long)]
    bounds: bool,
    /// No progress or summary output.
    #[arg(long)]
    quiet: bool,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } => Failure::Config(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn load(args: &Args) -> Result<ExperimentConfig, Failure> {
    let mut config = ExperimentConfig::from_file(&args.config).map_err(|e| Failure::Config(e.to_string()))?;
    if let Some(seed) = args.seed {
        config.base_seed = seed;
    }
    if let Some(trials) = args.trials {
        config.trials = trials;
    }
    if let Some(names) = &args.algorithms {
        for name in names {
            let known = config.algorithms.iter().any(|k| k.name() == name);
            if !known {
                return Err(Failure::Config(format!(
                    "--algorithms: `{name}` is not one of the configured algorithms ({})",
                    config.algorithms.iter().map(|k| k.name()).collect::<Vec<_>>().join(", ")
                )));
            }
        }
        config
            .algorithms
            .retain(|k: &PolicyKind| names.iter().any(|n| n == k.name()));
    }
    config.validate()?;
    Ok(config)
}

fn run(args: &Args) -> Result<(), Failure> {
    let config = load(args)?;
    let start = Instant::now();
    let experiment = Experiment::new(config.clone())?;
    if !args.quiet {
        eprintln!(
            "running {:?}: {} trials, T={}, {} worker(s)",
            config.scenario, config.trials, config.horizon, args.workers
        );
    }
    let records = experiment.run(args.workers)?;
    let summary = aggregate(&records)?;

    std::fs::create_dir_all(&args.out)
        .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", args.out.display())))?;
    write_records_file(&args.out.join("records.csv"), &records)?;
    write_summary_file(&args.out.join("summary.csv"), &summary)?;
    if args.bounds {
        write_bounds_file(&args.out.join("bounds.csv"), &experiment.bound_curve()?)?;
    }

    if !args.quiet {
        println!("{:<20} {:>8} {:>14} {:>10}", "algorithm", "t", "mean regret", "95% ±");
        for row in final_rows(&summary) {
            println!(
                "{:<20} {:>8} {:>14.3} {:>10.3}",
                row.algorithm, row.t, row.mean_cum_regret, row.ci95_halfwidth
            );
        }
        eprintln!("done in {:.1}s, wrote {}", start.elapsed().as_secs_f64(), args.out.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
