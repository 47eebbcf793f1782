use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod report;

use report::Format;

/// Local-operations measurement laboratory for orthogonal product-state ensembles.
#[derive(Debug, Parser)]
#[command(name = "locc", version)]
struct Cli {
    /// Seed for every randomized step (multi-start, samplers, Monte Carlo).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Confusion mass below which a protocol counts as perfect.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Inspect the state catalogs.
    #[command(subcommand)]
    Ensembles(EnsemblesCmd),
    /// Execute protocol trees stored as JSON.
    #[command(subcommand)]
    Protocol(ProtocolCmd),
    /// Build, evaluate and optimize the named strategies.
    #[command(subcommand)]
    Strategy(StrategyCmd),
    /// Upper bound on locally attainable information.
    #[command(subcommand)]
    Bound(BoundCmd),
    /// Dissectibility, entropy accounting, advice and quantum cost.
    #[command(subcommand)]
    Analyze(AnalyzeCmd),
    /// Strong measurement as a stream of weak ones.
    #[command(subcommand)]
    Weak(WeakCmd),
}

#[derive(Debug, Subcommand)]
enum EnsemblesCmd {
    List,
    /// Members, priors and Gram deviation. Accepts `<catalog>:<id,id,..>` subsets.
    Show {
        name: String,
    },
    /// Gram deviation of the catalogs and of the rotated family on an angle grid.
    Check {
        #[arg(long, default_value_t = 5)]
        grid: usize,
    },
}

#[derive(Debug, Subcommand)]
enum ProtocolCmd {
    /// Full run: summary plus one row per leaf.
    Run {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long, default_value = "nine")]
        ensemble: String,
    },
    /// Mutual information only.
    Mi {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long, default_value = "nine")]
        ensemble: String,
    },
}

#[derive(Debug, Subcommand)]
enum StrategyCmd {
    /// Build one strategy and evaluate it.
    Build {
        /// domino-cut | symmetric | single-p | five-param
        name: String,
        /// Comma-separated parameters (`p` or `p,q,r,s,t`).
        #[arg(long)]
        params: Option<String>,
        /// Member promised absent (domino-cut only); defaults the ensemble to the remaining eight.
        #[arg(long)]
        excluded: Option<usize>,
        #[arg(long)]
        ensemble: Option<String>,
        /// Optimize the parameters first.
        #[arg(long)]
        optimize: bool,
        #[arg(long, default_value_t = 24)]
        starts: usize,
        /// Print the tree as JSON instead of the evaluation.
        #[arg(long)]
        emit_tree: bool,
    },
    /// Multi-start simplex search over the family parameters.
    Optimize {
        name: String,
        #[arg(long, default_value_t = 24)]
        starts: usize,
        #[arg(long, default_value = "nine")]
        ensemble: String,
    },
}

#[derive(Debug, Subcommand)]
enum BoundCmd {
    /// Maximize the information deficit over epsilon.
    Optimize,
    /// Deficit chain at a single epsilon.
    At {
        #[arg(long)]
        epsilon: f64,
    },
    /// Deficit chain on an evenly spaced epsilon grid.
    Sweep {
        #[arg(long, default_value_t = 50)]
        epsilon_grid: usize,
    },
    /// Sample operator pairs meeting the preconditions and check every inequality.
    Verify {
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 0.005)]
        epsilon: f64,
    },
    /// Rigidity of the three-party operators.
    ThreeParty,
}

#[derive(Debug, Subcommand)]
enum AnalyzeCmd {
    Dissect {
        ensemble: String,
    },
    /// Check that random subsets of dissectible sets stay dissectible.
    Hereditary {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value = "nine")]
        ensemble: String,
    },
    /// Entropy, entanglement and advice accounting.
    Table,
    /// Optimal negative-hint distribution.
    Advice {
        /// Comma-separated weights, normalized internally.
        #[arg(long)]
        priors: String,
        /// Comma-separated zero-based indices; all by default.
        #[arg(long)]
        hintable: Option<String>,
    },
    /// Qubits shipped to finish the measurement at one site (nine | eight).
    Qcost {
        variant: String,
    },
    /// Entanglement produced by projecting onto a mixed member's support.
    Witness,
}

#[derive(Debug, Subcommand)]
enum WeakCmd {
    Simulate {
        /// Real amplitude of branch 0; branch 1 gets the rest.
        #[arg(long, default_value_t = 1.0)]
        alpha0: f64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long = "K")]
        k: usize,
        #[arg(long, default_value_t = 100_000)]
        runs: u64,
    },
    /// Majority failure against the exponential envelope on a grid.
    Bernstein,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::dispatch(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(commands::CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(commands::CliError::Compute(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
