//! `cogirs`: Monte-Carlo sweeps and single-realization runs from a TOML config.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 invalid configuration,
//! 3 failure budget exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use cogirs::channel_gen::realization_to_text;
use cogirs::experiment::{run_single, run_sweep, ExperimentConfig, Scheme};
use cogirs::Error;

#[derive(Parser)]
#[command(name = "cogirs", version, about = "IRS-assisted cognitive radio beamforming experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured sweep and write `<stem>.csv` and `<stem>_plot.py`.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Override the realization count.
        #[arg(long)]
        realizations: Option<usize>,
    },
    /// Run every scheme on one realization and write its traces.
    Single {
        #[command(flatten)]
        common: Common,
    },
    /// Parse and check a config, then print it with all defaults filled in.
    ValidateConfig {
        #[arg(short, long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    #[arg(short, long)]
    config: PathBuf,
    /// Base seed (sweep) or realization seed (single).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short, long)]
    output_dir: Option<PathBuf>,
    /// Comma-separated subset of proposed, baseline1, baseline2.
    #[arg(long, value_delimiter = ',')]
    schemes: Option<Vec<Scheme>>,
}

impl Common {
    fn load(&self) -> cogirs::Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.base_seed = seed;
        }
        if let Some(dir) = &self.output_dir {
            cfg.output_dir = Some(dir.clone());
        }
        if let Some(s) = &self.schemes {
            cfg.schemes = s.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn output_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("."))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::ValidateConfig { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            print!("{}", cfg.to_toml());
        }
        Command::Sweep { common, realizations } => {
            let mut cfg = common.load()?;
            if let Some(n) = realizations {
                cfg.realizations = n;
            }
            let table = run_sweep(&cfg)?;
            let (csv, plot) = table.emit(&output_dir(&cfg), &cfg.output_stem)?;
            for r in &table.rows {
                println!(
                    "{} = {:<8} {:<10} {:>9.4} ± {:.4}  ({} ok, {} failed)",
                    r.axis.name(),
                    r.sweep_value,
                    r.scheme.name(),
                    r.mean_sum_rate,
                    r.std_error,
                    r.realizations,
                    r.failures
                );
            }
            println!("wrote {} and {}", csv.display(), plot.display());
        }
        Command::Single { common } => {
            let cfg = common.load()?;
            let seed = cfg.base_seed;
            let report = run_single(&cfg, seed)?;
            let dir = output_dir(&cfg);
            fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
            let stem = format!("{}_seed{seed}", cfg.output_stem);
            write(&dir.join(format!("{stem}_realization.txt")), &realization_to_text(&report.realization))?;
            write(&dir.join(format!("{stem}_proposed.json")), &report.proposed.trace.to_json())?;
            write(&dir.join(format!("{stem}_baseline2.json")), &report.baseline2.trace.to_json())?;
            print!("{}", report.proposed.trace.to_text());
            println!("proposed  {:.6}", report.proposed.sum_rate);
            match report.baseline1 {
                Some(rate) => println!("baseline1 {rate:.6}"),
                None => println!("baseline1 n/a (n_t < K)"),
            }
            println!("baseline2 {:.6}", report.baseline2.sum_rate);
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Config(_) | Error::InvalidParameter(_)) => 2,
        Some(Error::FailureBudget { .. }) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            log::error!("{err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
