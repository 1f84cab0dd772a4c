//! `lgcp`: Laplace curves, simulation, Monte Carlo oracles, estimation and
//! fitting for planar log Gaussian Cox processes.

mod commands;
mod config;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ExperimentConfig, Overrides, RadiiSpec};

#[derive(Parser, Debug)]
#[command(name = "lgcp", version, about = "Palm-based summary functions of log Gaussian Cox processes")]
struct Cli {
    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// TOML experiment config; flags override its keys
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory
    #[arg(long, global = true, env = "LGCP_PALM_OUT")]
    out: Option<PathBuf>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Comma-separated grid parameters, e.g. 4,8,12,16
    #[arg(long, global = true, value_delimiter = ',')]
    q: Option<Vec<usize>>,

    /// Radius grid as MIN:MAX:COUNT
    #[arg(long, global = true, value_parser = RadiiSpec::parse)]
    radii: Option<RadiiSpec>,

    #[arg(long, global = true)]
    replications: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Laplace F, G, J curves and the convergence table across q
    Curves,
    /// Differences between the two G approximations across q
    #[command(name = "compare-g1-g2")]
    CompareG1G2,
    /// Simulate patterns and field rasters
    Simulate,
    /// Laplace against Monte Carlo with standard-error bands
    Oracle,
    /// Minimum-contrast fit of a pattern and the J model check
    Fit { pattern: PathBuf },
    /// Non-parametric K, F, G, J of a pattern
    Estimate { pattern: PathBuf },
}

fn run(cli: Cli) -> anyhow::Result<commands::Report> {
    let c = cli.common;
    let overrides = Overrides { out: c.out, seed: c.seed, q: c.q, radii: c.radii, replications: c.replications };
    let config = ExperimentConfig::load(c.config.as_deref())?.apply(overrides);
    config.validate()?;
    match &cli.command {
        Command::Curves => commands::curves(&config),
        Command::CompareG1G2 => commands::compare_g1_g2(&config),
        Command::Simulate => commands::simulate(&config),
        Command::Oracle => commands::oracle(&config),
        Command::Fit { pattern } => commands::fit(&config, pattern),
        Command::Estimate { pattern } => commands::estimate(&config, pattern),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(report) => {
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            if report.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                for f in &report.failures {
                    eprintln!("FAIL {f}");
                }
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
