mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use primpair::arith::ArithError;
use primpair::verify::VerifyError;

/// Primitive pairs with prescribed traces: bounds, sieve certificates and
/// brute-force checks.
#[derive(Parser, Debug)]
#[command(name = "primpair", version)]
pub struct Cli {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Factorization cache (JSON).
    #[arg(long, global = true, env = "PRIMPAIR_CACHE")]
    pub cache: Option<PathBuf>,
    /// Pollard-rho iterations per integer.
    #[arg(long, global = true)]
    pub budget_factor: Option<u64>,
    /// Largest representative count for exhaustive f-loops.
    #[arg(long, global = true)]
    pub budget_enum: Option<u128>,
    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Prime factors of N, with multiplicity.
    Factor { n: String },
    /// Exact main condition for (q, m, n).
    Check { q: u64, m: u32, n: u32 },
    /// Smallest passing sieve certificate for (q, m, n).
    Sieve { q: u64, m: u32, n: u32 },
    /// Recheck the transcribed certificate tables for m in a range like `7` or `7..12`.
    Appendix2 { range: Option<String> },
    /// Pairs failing the main condition below the threshold cascade.
    Scan { n: u32 },
    /// Worst-case sieve windows.
    Table1 { n: u32 },
    /// Resolve one pair: main condition, sieve, then brute force.
    Verify {
        q: u64,
        m: u32,
        n: u32,
        /// Force a sampled f-loop with this many draws.
        #[arg(long, conflicts_with = "exhaustive")]
        sample: Option<usize>,
        /// Force an exhaustive f-loop.
        #[arg(long)]
        exhaustive: bool,
        /// Largest q^m for brute force.
        #[arg(long)]
        alpha_limit: Option<u64>,
    },
    /// Compare the character-sum count with brute force on F_{p^(km)}.
    Crosscheck { p: u32, k: u32, m: u32, trials: usize },
}

/// Exit status for a failed command.
#[derive(Debug)]
pub enum Failure {
    Budget(String),
    Input(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        let budget = e.chain().any(|c| {
            matches!(c.downcast_ref::<ArithError>(), Some(ArithError::BudgetExceeded { .. }))
                || matches!(c.downcast_ref::<VerifyError>(), Some(VerifyError::Budget(_)))
        });
        if budget {
            Failure::Budget(format!("{e:#}"))
        } else {
            Failure::Input(format!("{e:#}"))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(3);
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().ok();
    }
    match commands::run(&cli) {
        Ok(code) => code,
        Err(Failure::Budget(msg)) => {
            eprintln!("budget exceeded: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
