//! `pospres`: batch front end for pospres-core.
//!
//! Every run prints one JSON verdict `{command, args, status, payload}` on
//! stdout. Exit codes: 0 ok / no violation found, 1 malformed input or
//! error, 2 budget exceeded, 3 violation found.

mod commands;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use commands::Outcome;

#[derive(Parser)]
#[command(name = "pospres")]
#[command(about = "Operator calculus and positivity-preserver tests on polynomial rings")]
#[command(version)]
struct Cli {
    /// Worker threads for parallel sweeps (default: all cores)
    #[arg(long, global = true, env = "POSPRES_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Recover the canonical form Σ q_α ∂^α from a table of monomial images
    Canon {
        /// JSON {"n", "images": [{"alpha", "image": <polynomial>}]}; missing monomials map to 0
        #[arg(long)]
        action: String,
        /// Highest derivative order D to recover
        #[arg(long)]
        order: u32,
    },
    /// Apply an operator to a polynomial
    Apply {
        /// Operator JSON (general or constant-coefficient format)
        #[arg(long)]
        operator: String,
        /// Polynomial JSON
        #[arg(long)]
        poly: String,
    },
    /// Convert a diagonal sequence between eigenvalues t and canonical coefficients c
    Diag {
        /// Diagonal sequence JSON with kind "t" or "c"
        #[arg(long)]
        sequence: String,
        /// Emit the canonical operator instead of the converted sequence
        #[arg(long)]
        operator: bool,
    },
    /// Exact exponential of a constant-coefficient algebra element
    Exp {
        /// Operator with zero constant term
        #[arg(long)]
        algebra: String,
        /// Truncation order D of the result
        #[arg(long)]
        order: u32,
        /// Scale the generator by this exact rational first
        #[arg(long, default_value = "1")]
        t: String,
    },
    /// Exact logarithm of a constant-coefficient group element
    Log {
        /// Operator with constant term 1
        #[arg(long)]
        group: String,
        /// Truncation order D of the result
        #[arg(long)]
        order: u32,
    },
    /// Search for invariant subspaces certifying that exp(tA) is well defined
    Member {
        /// Operator JSON
        #[arg(long)]
        operator: String,
        /// Seeds are all monomials up to this degree
        #[arg(long, default_value_t = 4)]
        seed_degree: u32,
        /// Give up once an orbit exceeds this degree
        #[arg(long, default_value_t = 12)]
        degree_budget: u32,
        /// Give up after this many applications per seed
        #[arg(long, default_value_t = 64)]
        iteration_budget: usize,
        /// Polynomial to exponentiate on the certified block
        #[arg(long)]
        poly: Option<String>,
        /// Time for the block exponential, exact rational
        #[arg(long, default_value = "1")]
        t: String,
        /// Comma-separated k values for the limit formulas (requires --poly)
        #[arg(long)]
        limit: Option<String>,
    },
    /// Truncated moment test of the preserver property on a grid of base points
    Check {
        /// Operator JSON
        #[arg(long)]
        operator: String,
        /// R, halfline, or interval:a,b
        #[arg(long = "K", default_value = "R")]
        k: String,
        /// "auto" or a grid JSON file
        #[arg(long, default_value = "auto")]
        grid: String,
        /// Moment order d (uses α!·q_α up to |α| = 2d)
        #[arg(long)]
        order: u32,
        /// Absolute eigenvalue threshold
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Re-verify a violation certificate against an operator
    Verify {
        /// Certificate JSON as emitted by check or sweep
        #[arg(long)]
        certificate: String,
        /// The operator the certificate refutes
        #[arg(long)]
        operator: String,
    },
    /// Constant-coefficient generator from a Lévy triplet
    Synth {
        /// Triplet JSON
        #[arg(long)]
        triplet: String,
        /// Order D of the generator (at least 2)
        #[arg(long)]
        order: u32,
    },
    /// Evolve a polynomial under the semigroup of a Lévy triplet
    Evolve {
        /// Triplet JSON
        #[arg(long)]
        triplet: String,
        /// Time t ≥ 0, exact rational
        #[arg(long)]
        t: String,
        /// Polynomial JSON
        #[arg(long)]
        poly: String,
        /// Also write coefficient trajectories as CSV to this file
        #[arg(long)]
        csv: Option<String>,
        /// Comma-separated times for the CSV (default: --t)
        #[arg(long)]
        times: Option<String>,
    },
    /// Refutation sweep of exp(tA) over times and base points
    Sweep {
        /// Generator: constant-coefficient, or degree-preserving general operator
        #[arg(long)]
        gen: String,
        /// R, halfline, or interval:a,b
        #[arg(long = "K", default_value = "R")]
        k: String,
        /// Comma-separated positive times
        #[arg(long, default_value = "1/4,1,4")]
        tgrid: String,
        /// "auto" or a grid JSON file
        #[arg(long, default_value = "auto")]
        ygrid: String,
        /// Moment order d
        #[arg(long)]
        order: u32,
        /// Absolute eigenvalue threshold
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Canon { .. } => "canon",
            Command::Apply { .. } => "apply",
            Command::Diag { .. } => "diag",
            Command::Exp { .. } => "exp",
            Command::Log { .. } => "log",
            Command::Member { .. } => "member",
            Command::Check { .. } => "check",
            Command::Verify { .. } => "verify",
            Command::Synth { .. } => "synth",
            Command::Evolve { .. } => "evolve",
            Command::Sweep { .. } => "sweep",
        }
    }
}

fn emit(command: &str, args: &[String], outcome: &Outcome) -> ExitCode {
    let verdict = json!({
        "command": command,
        "args": args,
        "status": outcome.status(),
        "payload": outcome.payload(),
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&verdict).expect("verdict serializes")
    );
    ExitCode::from(outcome.exit_code())
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            // clap would exit with 2, which is reserved for budget exhaustion.
            eprint!("{e}");
            let outcome = Outcome::Error(json!({ "message": e.kind().to_string() }));
            return emit("", &args, &outcome);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            return emit(
                cli.command.name(),
                &args,
                &Outcome::Error(json!(e.to_string())),
            );
        }
    }
    let outcome = commands::run(&cli.command).unwrap_or_else(Outcome::from_error);
    emit(cli.command.name(), &args, &outcome)
}
