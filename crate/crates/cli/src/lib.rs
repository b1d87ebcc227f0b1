//! `hka-credit` command-line front end.

pub mod commands;
pub mod config;
pub mod csv;
mod error;

use std::io::Write;
use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand};

pub use error::{CliError, Result};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "HKA_THREADS";

#[derive(Debug, Parser)]
#[command(name = "hka-credit", version, about = "Defaultable bond pricing under the killed heat-kernel quadratic model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Defaultable and default-free prices plus the credit spread at (t, T).
    Price(PriceArgs),
    /// Default-free yield curves as CSV.
    YieldCurve(CommonArgs),
    /// Credit spread curves as CSV.
    SpreadCurve(CommonArgs),
    /// Closed forms against the Monte Carlo oracle.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides `mc.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PriceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Valuation time.
    #[arg(long = "t", default_value_t = 0.0, allow_negative_numbers = true)]
    pub t: f64,
    /// Maturity.
    #[arg(long = "T", allow_negative_numbers = true)]
    pub maturity: f64,
    /// Whether the issuer has survived up to t.
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub survived: bool,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, hide = true)]
    pub debug_minus_sign: bool,
}

fn load(common: &CommonArgs) -> Result<config::ScenarioConfig> {
    let mut cfg = commands::load_config(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.mc.seed = seed;
    }
    Ok(cfg)
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Price(a) => {
            let cfg = load(&a.common)?;
            commands::cmd_price(&cfg, a.t, a.maturity, a.survived, stdout)
        }
        Command::YieldCurve(a) => {
            let cfg = load(a)?;
            commands::cmd_yield_curve(&cfg, a.out.as_deref(), stdout)
        }
        Command::SpreadCurve(a) => {
            let cfg = load(a)?;
            commands::cmd_spread_curve(&cfg, a.out.as_deref(), stdout)
        }
        Command::Validate(a) => {
            let cfg = load(&a.common)?;
            commands::cmd_validate(&cfg, a.debug_minus_sign, a.common.out.as_deref(), stdout)
        }
    }
}

/// Worker count from `HKA_THREADS`; `None` means rayon's default.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::config(THREADS_ENV, format!("expected a positive integer, got `{v}`"))),
        },
    }
}
