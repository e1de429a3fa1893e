use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hitchhike::analytics::{LevelSum, RhoScaling};
use hitchhike::harness::{emit, run_experiment, ExperimentConfig, Mode, OutputFormat, PathModel};
use hitchhike::Error;

#[derive(Parser)]
#[command(name = "hitchhike", version, about = "Hitchhiking experiments under recurrent beneficial mutation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulated heterozygosity ratio against the Yule and star-like formulas.
    HetCompare(Flags),
    /// Simulated fixation-time moments against their expansions.
    FixationTimes(Flags),
    /// Structured coalescent against the marked Yule forest.
    YuleVsCoalescent(Flags),
    /// Green-function quadrature against the closed forms.
    GreenCheck(Flags),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Wf,
    Diffusion,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sum {
    Exclusive,
    Inclusive,
}

#[derive(Clone, Copy, ValueEnum)]
enum StarScaling {
    LogAlpha,
    SweepDuration,
}

#[derive(Args)]
struct Flags {
    /// TOML file with defaults; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    pop_size: Option<u64>,
    #[arg(long)]
    sample_size: Option<usize>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    theta_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    rho_grid: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    model: Option<Model>,
    #[arg(long, value_enum)]
    level_sum: Option<Sum>,
    #[arg(long, value_enum)]
    star_scaling: Option<StarScaling>,
    /// Formula columns only, no simulation.
    #[arg(long)]
    curve: bool,
    /// Output file; stdout if omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn build(mode: Mode, f: Flags) -> Result<ExperimentConfig, Error> {
    let mut c = match &f.config {
        Some(path) => ExperimentConfig::from_toml_file(path).map_err(|e| Error::Config(e.to_string()))?,
        None => ExperimentConfig::default(),
    };
    c.mode = mode;
    macro_rules! set {
        ($($field:ident),*) => { $(if let Some(v) = f.$field { c.$field = v; })* };
    }
    set!(alpha, theta, pop_size, sample_size, replicates, seed);
    if f.rho.is_some() {
        c.rho = f.rho;
        c.gamma = None;
    }
    if f.gamma.is_some() {
        c.gamma = f.gamma;
        c.rho = None;
    }
    if f.workers.is_some() {
        c.workers = f.workers;
    }
    if f.theta_grid.is_some() {
        c.theta_grid = f.theta_grid;
    }
    if f.rho_grid.is_some() {
        c.rho_grid = f.rho_grid;
    }
    if let Some(m) = f.model {
        c.model = match m {
            Model::Wf => PathModel::Wf,
            Model::Diffusion => PathModel::Diffusion,
        };
    }
    if let Some(s) = f.level_sum {
        c.level_sum = match s {
            Sum::Exclusive => LevelSum::Exclusive,
            Sum::Inclusive => LevelSum::Inclusive,
        };
    }
    if let Some(s) = f.star_scaling {
        c.star_scaling = match s {
            StarScaling::LogAlpha => RhoScaling::LogAlpha,
            StarScaling::SweepDuration => RhoScaling::SweepDuration,
        };
    }
    if f.curve {
        c.curve = true;
    }
    if f.output.is_some() {
        c.output = f.output;
    }
    if let Some(fmt) = f.format {
        c.format = match fmt {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
    }
    c.validate()?;
    Ok(c)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // malformed flags count as configuration errors
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (mode, flags) = match cli.command {
        Command::HetCompare(f) => (Mode::HetCompare, f),
        Command::FixationTimes(f) => (Mode::FixationTimes, f),
        Command::YuleVsCoalescent(f) => (Mode::YuleVsCoalescent, f),
        Command::GreenCheck(f) => (Mode::GreenCheck, f),
    };
    let config = match build(mode, flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let table = match run_experiment(&config) {
        Ok(t) => t,
        Err(e @ Error::ReplicateFailures { .. }) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        Err(e @ (Error::Config(_) | Error::InvalidParams(_))) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if table.replicate_failures > 0 {
        eprintln!("warning: {} replicate(s) failed and were dropped", table.replicate_failures);
    }
    let result = match &config.output {
        Some(path) => emit(&table, config.format, path),
        None => table.render(config.format).map(|s| print!("{s}")),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
