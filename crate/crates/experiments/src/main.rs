use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use daylight_core::forward::CorrelationSet;
use daylight_experiments::config::{validate_config, ExperimentConfig, NormalizedConfig, Preset};
use daylight_experiments::error::{ExperimentError, Result, StageExt};
use daylight_experiments::manifest::{default_output_dir, write_run};
use daylight_experiments::pipelines::{self, RunOutput};

#[derive(Parser)]
#[command(name = "daylight", version, about = "Passive daylight imaging and wave-speed estimation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (defaults to `out/<preset>`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel stages.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Use the full-scale grids instead of the desk-scale defaults.
    #[arg(long, global = true)]
    full: bool,
    /// Only validate and print the effective configuration.
    #[arg(long, global = true)]
    dry_run: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Forward-model correlations.
    Simulate {
        #[arg(long)]
        preset: Option<Preset>,
    },
    /// Migrate correlation data over the preset's search grid.
    Migrate {
        #[arg(long)]
        preset: Option<Preset>,
        /// Correlation file written by `simulate`.
        #[arg(long)]
        data: PathBuf,
    },
    /// Joint reflector location and wave-speed estimate.
    Estimate {
        #[arg(long)]
        preset: Option<Preset>,
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Effective wave speed of a random medium.
    EstimateEffective {
        #[arg(long)]
        preset: Option<Preset>,
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Point-spread-function theory curves.
    Psf {
        #[arg(long)]
        preset: Option<Preset>,
    },
    /// Monte-Carlo statistics of the estimator.
    Montecarlo {
        #[arg(long)]
        preset: Option<Preset>,
    },
    /// Run a named preset end to end.
    Run {
        #[arg(long)]
        preset: Option<Preset>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate { .. } => "simulate",
            Command::Migrate { .. } => "migrate",
            Command::Estimate { .. } => "estimate",
            Command::EstimateEffective { .. } => "estimate-effective",
            Command::Psf { .. } => "psf",
            Command::Montecarlo { .. } => "montecarlo",
            Command::Run { .. } => "run",
        }
    }

    fn preset(&self) -> (Option<Preset>, Preset) {
        match *self {
            Command::Simulate { preset } => (preset, Preset::Fig6SpeedCurve),
            Command::Migrate { preset, .. } => (preset, Preset::Fig6SpeedCurve),
            Command::Estimate { preset, .. } => (preset, Preset::Fig6SpeedCurve),
            Command::EstimateEffective { preset, .. } => (preset, Preset::RandomEffectiveSpeed),
            Command::Psf { preset } => (preset, Preset::Fig4Mismatch),
            Command::Montecarlo { preset } => (preset, Preset::Table1Montecarlo),
            Command::Run { preset } => (preset, Preset::Custom),
        }
    }
}

fn load_config(cli: &Cli) -> Result<NormalizedConfig> {
    let (explicit, fallback) = cli.command.preset();
    let mut raw = match &cli.common.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => ExperimentConfig::preset(explicit.unwrap_or(fallback)),
    };
    if let Some(p) = explicit {
        raw.preset = p;
    }
    if cli.common.seed.is_some() {
        raw.seed = cli.common.seed;
    }
    if cli.common.out.is_some() {
        raw.output_dir = cli.common.out.clone();
    }
    raw.full |= cli.common.full;
    validate_config(&raw)
}

fn read_data(path: &PathBuf) -> Result<CorrelationSet> {
    let file = File::open(path)?;
    CorrelationSet::read_from(BufReader::new(file)).stage("forward")
}

fn execute(cli: &Cli, cfg: &NormalizedConfig) -> Result<RunOutput> {
    match &cli.command {
        Command::Simulate { .. } => pipelines::render_correlations(&pipelines::simulate(cfg)?.1),
        Command::Migrate { data, .. } => pipelines::migrate_data(cfg, &read_data(data)?),
        Command::Estimate { data, .. } => pipelines::estimate(cfg, data.as_ref().map(read_data).transpose()?.as_ref()),
        Command::EstimateEffective { data, .. } => {
            pipelines::estimate_effective(cfg, data.as_ref().map(read_data).transpose()?.as_ref())
        }
        Command::Psf { .. } => pipelines::psf(cfg),
        Command::Montecarlo { .. } => {
            if cfg.preset != Preset::Table1Montecarlo {
                return Err(ExperimentError::config("preset", "montecarlo needs the table1_montecarlo preset"));
            }
            pipelines::run(cfg)
        }
        Command::Run { .. } => pipelines::run(cfg),
    }
}

fn main_inner(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| ExperimentError::config("--threads", e.to_string()))?;
    }
    let cfg = load_config(cli)?;
    if cfg.full {
        eprintln!("warning: {}", pipelines::full_scale_warning(cfg.preset));
    }
    if cli.common.dry_run {
        println!("{}", cfg.echo());
        return Ok(());
    }
    let start = Instant::now();
    let mut output = execute(cli, &cfg)?;
    if cfg.full {
        output.warnings.insert(0, pipelines::full_scale_warning(cfg.preset));
    }
    for w in output.warnings.iter().skip(cfg.full as usize) {
        eprintln!("warning: {w}");
    }
    let dir = default_output_dir(&cfg);
    let manifest = write_run(&dir, cli.command.name(), &cfg, &output, start.elapsed().as_secs_f64())?;
    println!("{} files written to {}", manifest.files.len(), dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
