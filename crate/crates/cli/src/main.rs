use std::path::PathBuf;
use std::process::ExitCode;

use allpay_core::metrics::RevenueReport;
use allpay_core::report;
use allpay_core::sabotage::SabotageScenario;
use allpay_core::simulator::{audit_all, simulate_and_compare};
use allpay_core::uniform::{UniformCase, UniformReport};
use allpay_core::{AuctionConfigF64, EquilibriumF64};
use clap::{Args, Parser, Subcommand, ValueEnum};

const THREADS_ENV: &str = "ALLPAY_EQ_THREADS";

/// Equilibria, revenue and verification for all-pay auctions with bidder failures.
#[derive(Parser, Debug)]
#[command(name = "allpay-eq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Breakpoints, expected bids and utilities, and both revenue models.
    Equilibrium(Source),
    /// CDF and density of every bidder on an evenly spaced grid.
    Table {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 101)]
        grid: usize,
    },
    /// Monte Carlo run compared against the closed forms.
    Simulate {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Optimal bid after lowering a rival's participation probability.
    Sabotage {
        #[command(flatten)]
        source: Source,
        /// Saboteur, 1-based position in the probability list.
        #[arg(long = "i")]
        saboteur: usize,
        /// Target, 1-based position in the probability list.
        #[arg(long = "r")]
        target: usize,
        /// Target's real participation probability after sabotage.
        #[arg(long = "p-prime")]
        p_prime: f64,
    },
    /// Closed forms for identical participation probabilities.
    Uniform {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Best pure-bid deviation of every bidder on a grid.
    Audit {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 10_000)]
        grid: usize,
    },
}

#[derive(Args, Debug)]
struct Source {
    /// Comma-separated participation probabilities.
    #[arg(long, allow_hyphen_values = true)]
    probs: Option<String>,
    /// JSON file of the form {"probabilities": [...]}.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug)]
enum Failure {
    /// Bad input; exit 2.
    Invalid(String),
    /// Anything else; exit 1.
    Internal(String),
}

impl From<allpay_core::Error> for Failure {
    fn from(e: allpay_core::Error) -> Self {
        match e {
            allpay_core::Error::ThreadPool(msg) => Failure::Internal(msg),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

type Outcome = Result<String, Failure>;

impl Source {
    fn load(&self) -> Result<AuctionConfigF64, Failure> {
        match (&self.probs, &self.config) {
            (Some(_), Some(_)) => Err(Failure::Invalid("give probabilities with --probs or --config, not both".into())),
            (None, None) => Err(Failure::Invalid("missing --probs or --config".into())),
            (Some(inline), None) => {
                let raw = inline
                    .split(',')
                    .map(|s| {
                        s.trim().parse::<f64>().map_err(|e| Failure::Invalid(format!("bad probability {s:?}: {e}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(AuctionConfigF64::new(&raw)?)
            }
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::Invalid(format!("cannot read {}: {e}", path.display())))?;
                Ok(AuctionConfigF64::from_json(&text)?)
            }
        }
    }

    fn equilibrium(&self) -> Result<EquilibriumF64, Failure> {
        Ok(EquilibriumF64::new(self.load()?)?)
    }
}

fn json<S: serde::Serialize>(value: &S) -> Outcome {
    serde_json::to_string_pretty(value).map(|s| s + "\n").map_err(|e| Failure::Internal(e.to_string()))
}

fn threads() -> Result<Option<usize>, Failure> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t >= 1 => Ok(Some(t)),
            _ => Err(Failure::Invalid(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

/// 1-based caller position to rank.
fn rank(config: &AuctionConfigF64, position: usize, flag: &str) -> Result<usize, Failure> {
    if position == 0 || position > config.caller_count() {
        return Err(Failure::Invalid(format!("--{flag} {position} is not in 1..={}", config.caller_count())));
    }
    config
        .rank_of(position - 1)
        .ok_or_else(|| Failure::Invalid(format!("--{flag} {position} has participation probability 0")))
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Equilibrium(source) => {
            let r = RevenueReport::new(&source.equilibrium()?);
            match source.format {
                Format::Json => json(&r),
                Format::Csv => Ok(report::revenue_report_csv(&r)),
            }
        }
        Command::Table { source, grid } => {
            let rows = report::distribution_table(&source.equilibrium()?, grid)?;
            match source.format {
                Format::Json => json(&rows),
                Format::Csv => Ok(report::distribution_table_csv(&rows)),
            }
        }
        Command::Simulate { source, trials, seed } => {
            let v = simulate_and_compare(&source.load()?, trials, seed, threads()?)?;
            match source.format {
                Format::Json => json(&v),
                Format::Csv => Ok(report::simulation_report_csv(&v.simulation) + "\n" + &report::comparison_csv(&v)),
            }
        }
        Command::Sabotage { source, saboteur, target, p_prime } => {
            let eq = source.equilibrium()?;
            let i = rank(eq.config(), saboteur, "i")?;
            let r = rank(eq.config(), target, "r")?;
            let plan = SabotageScenario::new(&eq, i, r, p_prime)?.optimal_bid();
            match source.format {
                Format::Json => json(&plan),
                Format::Csv => Ok(report::sabotage_plan_csv(&plan)),
            }
        }
        Command::Uniform { n, p, format } => {
            let r = UniformReport::new(&UniformCase::new(n, p)?);
            match format {
                Format::Json => json(&r),
                Format::Csv => Ok(report::uniform_report_csv(&r)),
            }
        }
        Command::Audit { source, grid } => {
            let reports = audit_all(&source.equilibrium()?, grid)?;
            match source.format {
                Format::Json => json(&reports),
                Format::Csv => Ok(report::audit_csv(&reports)),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(1)
        }
    }
}
