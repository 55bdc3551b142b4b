//! Command-line front end: `gen-data`, `train-one`, `run-grid`, `report`.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::datagen::{fit_standardizer, DataBundle};
use crate::error::Error;
use crate::harness::{
    append_jsonl, enumerate_grid, read_jsonl, run_ensemble, ExperimentConfig, GridFilter, Report,
    DEFAULT_ENSEMBLE,
};
use crate::nn::InjectionScheme;
use crate::physics::PhysicsSet;
use crate::seed::derive_seed;
use crate::trainer::{evaluate, split_validation, train, TrainConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

pub const RESULTS_JSONL: &str = "results.jsonl";

#[derive(Debug, Parser)]
#[command(name = "pgdnn", version, about = "Physics-guided DNN experiments on thin-plate vibration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the grid, its split, the scarce subsets and both test sets as CSV
    GenData {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "data")]
        out_dir: PathBuf,
    },
    /// Train one replicate of one configuration; write its loss history and errors
    TrainOne {
        #[command(flatten)]
        config: ConfigArgs,
        /// Replicate index within the configuration's ensemble
        #[arg(long, default_value_t = 0)]
        replicate: usize,
        #[arg(long, default_value = "train-one")]
        out_dir: PathBuf,
    },
    /// Run seeded ensembles over the (optionally filtered) experiment grid
    RunGrid {
        #[command(flatten)]
        filter: FilterArgs,
        #[arg(long, default_value_t = DEFAULT_ENSEMBLE)]
        ensemble: usize,
        /// Worker threads; defaults to the number of cores
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, default_value = "results")]
        out_dir: PathBuf,
    },
    /// Rebuild report tables from saved per-config results
    Report {
        #[arg(long, default_value = "results")]
        out_dir: PathBuf,
        /// Saved results; defaults to <out-dir>/results.jsonl
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct ConfigArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 261)]
    train_size: usize,
    /// Comma list from W,D,G, or "none"
    #[arg(long, default_value = "none")]
    physics: String,
    /// Comma list of layers 1-5, a range such as 2-4, or "none"
    #[arg(long, default_value = "none")]
    layers: String,
}

#[derive(Debug, Args)]
struct FilterArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    train_size: Option<usize>,
    #[arg(long)]
    physics: Option<String>,
    #[arg(long)]
    layers: Option<String>,
}

type CliResult = std::result::Result<(), Failure>;

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

fn usage(e: Error) -> Failure {
    Failure::Usage(e.to_string())
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nRun `pgdnn help` for usage.");
            EXIT_USAGE
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            EXIT_RUNTIME
        }
    }
}

fn run(command: Command) -> CliResult {
    match command {
        Command::GenData { seed, out_dir } => gen_data(seed, &out_dir),
        Command::TrainOne {
            config,
            replicate,
            out_dir,
        } => train_one(&config, replicate, &out_dir),
        Command::RunGrid {
            filter,
            ensemble,
            jobs,
            out_dir,
        } => run_grid(&filter, ensemble, jobs, &out_dir),
        Command::Report { out_dir, input } => {
            let input = input.unwrap_or_else(|| out_dir.join(RESULTS_JSONL));
            let report = Report::new(read_jsonl(&input)?)?;
            let files = report.write_all(&out_dir)?;
            println!("wrote {} files to {}", files.len(), out_dir.display());
            Ok(())
        }
    }
}

fn gen_data(seed: u64, out_dir: &Path) -> CliResult {
    let bundle = DataBundle::generate(seed);
    for name in bundle.write_all(out_dir)? {
        println!("{}", out_dir.join(name).display());
    }
    Ok(())
}

fn train_one(args: &ConfigArgs, replicate: usize, out_dir: &Path) -> CliResult {
    let physics = PhysicsSet::parse(&args.physics).map_err(usage)?;
    let scheme = InjectionScheme::parse(&args.layers).map_err(usage)?;
    let config = ExperimentConfig::new(physics, scheme, args.train_size, replicate + 1, args.seed)
        .map_err(usage)?;

    let data = DataBundle::generate(args.seed);
    let subset = data.training_subset(config.train_size)?;
    let standardizer = fit_standardizer(&subset, physics)?;
    let seed = config.replicate_seed(replicate);
    let (fit, val) = split_validation(&subset, derive_seed(seed, "validation", 0))?;
    let record = train(
        &standardizer.encode(&fit),
        &standardizer.encode(&val),
        scheme,
        seed,
        &TrainConfig::default(),
    )?;
    let test1 = evaluate(&record.network, &data.test1, &standardizer)?;
    let test2 = evaluate(&record.network, &data.test2, &standardizer)?;

    std::fs::create_dir_all(out_dir).map_err(Error::from)?;
    record.write_loss_history(&out_dir.join("loss_history.csv"))?;
    record.network.save(&out_dir.join("params.txt"))?;
    let summary = serde_json::json!({
        "config_id": config.id(),
        "replicate": replicate,
        "seed": seed,
        "optimizer_steps": record.steps,
        "final_train_loss": record.final_train_loss(),
        "final_val_loss": record.final_val_loss(),
        "test1": test1,
        "test2": test2,
    });
    let text = serde_json::to_string_pretty(&summary).map_err(Error::from)?;
    std::fs::write(out_dir.join("summary.json"), &text).map_err(Error::from)?;
    println!("{text}");
    Ok(())
}

fn run_grid(
    args: &FilterArgs,
    ensemble: usize,
    jobs: Option<usize>,
    out_dir: &Path,
) -> CliResult {
    if ensemble == 0 {
        return Err(Failure::Usage("--ensemble must be at least 1".into()));
    }
    if jobs == Some(0) {
        return Err(Failure::Usage("--jobs must be at least 1".into()));
    }
    let filter = GridFilter {
        train_size: args.train_size,
        physics_set: args.physics.as_deref().map(PhysicsSet::parse).transpose().map_err(usage)?,
        scheme: args.layers.as_deref().map(InjectionScheme::parse).transpose().map_err(usage)?,
    };
    let configs: Vec<ExperimentConfig> = enumerate_grid(args.seed, ensemble)
        .into_iter()
        .filter(|c| filter.accepts(c))
        .collect();
    if configs.is_empty() {
        return Err(Failure::Usage(
            "the filters select no configuration (physics and layers must be both none or both set; sizes are 261, 117, 60, 30)".into(),
        ));
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::invalid(e.to_string()))?;
    let data = DataBundle::generate(args.seed);
    let traces = out_dir.join("traces");
    std::fs::create_dir_all(&traces).map_err(Error::from)?;
    let jsonl = out_dir.join(RESULTS_JSONL);
    if jsonl.exists() {
        std::fs::remove_file(&jsonl).map_err(Error::from)?;
    }

    let train_config = TrainConfig::default();
    let started = std::time::Instant::now();
    for (i, config) in configs.iter().enumerate() {
        let result = pool.install(|| run_ensemble(config, &data, &train_config))?;
        append_jsonl(&jsonl, &result.summary())?;
        result.trace.write_csv(&traces.join(format!("{}.csv", config.id())))?;
        eprintln!(
            "[{}/{}] {} test1 {:.2}% test2 {:.2}% ({:.0?})",
            i + 1,
            configs.len(),
            config.id(),
            result.test1.mean,
            result.test2.mean,
            started.elapsed()
        );
    }

    let report = Report::new(read_jsonl(&jsonl)?)?;
    let files = report.write_all(out_dir)?;
    println!(
        "{} configs, {} training runs; wrote {} report files to {}",
        configs.len(),
        configs.len() * ensemble,
        files.len(),
        out_dir.display()
    );
    Ok(())
}
