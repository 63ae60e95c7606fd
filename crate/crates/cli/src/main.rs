mod commands;
mod manifest;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand};
use serde_json::Value;

use commands::{Limits, Outcome, Status};
use manifest::{hash_inputs, versions, RunManifest};
use schurkit::iso::DEFAULT_BUDGET;
use schurkit::Error;

/// Schur rings over finite abelian groups: enumeration, constructions,
/// isomorphism and separability checks, and WL comparisons.
///
/// Result rows go to standard output, one JSON object per line. A run
/// manifest goes to standard error, or to --manifest. Exit codes: 0 ok,
/// 1 a checked property was violated, 2 bad input, 3 search budget exhausted.
#[derive(Parser, Debug)]
#[command(name = "schurkit", version)]
struct Cli {
    /// Write the run manifest to this file instead of standard error.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Node budget for each backtracking search.
    #[arg(long, global = true, env = "SCHURKIT_BUDGET_NODES")]
    budget_nodes: Option<u64>,
    /// Wall-clock limit in seconds for the whole run; searches still running
    /// at the deadline stop as if their node budget were exhausted.
    #[arg(long, global = true, env = "SCHURKIT_TIME_LIMIT_SECS")]
    time_limit_secs: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a named family member and report its class-size signature.
    Construct(commands::ConstructArgs),
    /// List every S-ring over a group.
    Enumerate(commands::EnumerateArgs),
    /// Tag each S-ring with the structural statements it satisfies.
    Classify(commands::ClassifyArgs),
    /// Isomorphisms between two S-rings.
    Iso(commands::IsoArgs),
    /// Check that every algebraic isomorphism from an S-ring is induced.
    Separability(commands::SeparabilityArgs),
    /// Check separability of every S-ring over every abelian group of order 9p.
    VerifyMainTheorem(commands::MainTheoremArgs),
    /// Pairwise algebraic non-isomorphism of the order-9p families.
    NonisomMatrix(commands::NonisomArgs),
    /// Compare WL stabilization of Cayley graphs with the S-ring closure.
    WlCheck(commands::WlCheckArgs),
    /// WL equivalence and isomorphism of two graphs.
    WlPair(commands::WlPairArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Construct(_) => "construct",
            Command::Enumerate(_) => "enumerate",
            Command::Classify(_) => "classify",
            Command::Iso(_) => "iso",
            Command::Separability(_) => "separability",
            Command::VerifyMainTheorem(_) => "verify-main-theorem",
            Command::NonisomMatrix(_) => "nonisom-matrix",
            Command::WlCheck(_) => "wl-check",
            Command::WlPair(_) => "wl-pair",
        }
    }

    fn parameters(&self) -> Value {
        let value = match self {
            Command::Construct(a) => serde_json::to_value(a),
            Command::Enumerate(a) => serde_json::to_value(a),
            Command::Classify(a) => serde_json::to_value(a),
            Command::Iso(a) => serde_json::to_value(a),
            Command::Separability(a) => serde_json::to_value(a),
            Command::VerifyMainTheorem(a) => serde_json::to_value(a),
            Command::NonisomMatrix(a) => serde_json::to_value(a),
            Command::WlCheck(a) => serde_json::to_value(a),
            Command::WlPair(a) => serde_json::to_value(a),
        };
        value.unwrap_or(Value::Null)
    }

    fn inputs(&self) -> Vec<&Path> {
        match self {
            Command::Classify(a) => a.catalog.iter().map(PathBuf::as_path).collect(),
            Command::Iso(a) => vec![&a.first, &a.second],
            Command::Separability(a) => a
                .subject
                .iter()
                .chain(&a.targets)
                .chain(&a.verify)
                .map(PathBuf::as_path)
                .collect(),
            Command::VerifyMainTheorem(a) => a.checkpoint.iter().map(PathBuf::as_path).collect(),
            Command::WlPair(a) => vec![&a.first, &a.second],
            _ => Vec::new(),
        }
    }
}

fn run(command: &Command, limits: &Limits) -> schurkit::Result<Outcome> {
    match command {
        Command::Construct(a) => commands::construct(a),
        Command::Enumerate(a) => commands::enumerate(a),
        Command::Classify(a) => commands::classify(a, limits),
        Command::Iso(a) => commands::iso(a, limits),
        Command::Separability(a) => commands::separability(a, limits),
        Command::VerifyMainTheorem(a) => commands::verify_main_theorem(a, limits),
        Command::NonisomMatrix(a) => commands::nonisom_matrix(a),
        Command::WlCheck(a) => commands::wl_check(a, limits),
        Command::WlPair(a) => commands::wl_pair(a, limits),
    }
}

fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded { .. } => Status::BudgetExhausted.exit_code(),
        Error::InternalInvariant(_) => Status::Violation.exit_code(),
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let inputs: Vec<&Path> = cli.command.inputs();
    // hash before running: a checkpoint may be rewritten by the run
    let input_hashes = hash_inputs(&inputs);
    let start = Instant::now();
    let deadline = match cli.time_limit_secs.map(Duration::try_from_secs_f64) {
        Some(Ok(limit)) => Some(start + limit),
        Some(Err(_)) => {
            eprintln!("error: --time-limit-secs must be a non-negative number");
            return ExitCode::from(2);
        }
        None => None,
    };
    let limits = Limits {
        nodes: cli.budget_nodes.unwrap_or(DEFAULT_BUDGET),
        deadline,
        explicit: cli.budget_nodes.is_some() || cli.time_limit_secs.is_some(),
    };
    let result = run(&cli.command, &limits);
    let timing_ms = start.elapsed().as_millis();

    let (summary, exit_code) = match result {
        Ok(outcome) => {
            if let Err(e) = commands::write_rows(&outcome.rows) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    eprintln!("error: writing results: {e}");
                    return ExitCode::from(2);
                }
            }
            (outcome.summary, outcome.status.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            (serde_json::json!({ "error": e.to_string() }), error_exit_code(&e))
        }
    };

    let mut parameters = cli.command.parameters();
    parameters["budget_nodes"] = limits.nodes.into();
    parameters["time_limit_secs"] = cli.time_limit_secs.into();
    let record = RunManifest {
        kind: "manifest",
        command: cli.command.name().to_string(),
        parameters,
        versions: versions(),
        input_hashes,
        timing_ms,
        summary,
        exit_code,
    };
    let line = serde_json::to_string(&record).expect("manifest serializes");
    match &cli.manifest {
        Some(path) => {
            if let Err(e) = std::fs::write(path, line + "\n") {
                eprintln!("error: writing manifest {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => {
            let _ = writeln!(std::io::stderr(), "{line}");
        }
    }
    ExitCode::from(exit_code as u8)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn errors_map_to_exit_codes() {
        let budget = Error::BudgetExceeded { budget: 1, progress: String::new() };
        assert_eq!(error_exit_code(&budget), 3);
        assert_eq!(error_exit_code(&Error::InternalInvariant(String::new())), 1);
        assert_eq!(error_exit_code(&Error::NotWellDefined(String::new())), 2);
    }
}
