use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use opalg::error::Error;
use opalg::io::parse_algebra;
use opalg::report::{algebra_from_matrices, analyze, AnalysisOptions};
use opalg::reproduce::{reproduce, GROUPS};
use opalg::search::{run_search, SearchConfig};
use opalg::ToleranceConfig;

const EXIT_INTERNAL: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_NOT_ALGEBRA: u8 = 3;
const EXIT_UNDECIDABLE: u8 = 4;

#[derive(Parser)]
#[command(name = "opalg", version, about = "Reversibility, symmetry and structure of finite-dimensional operator algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Copy)]
struct TolArgs {
    /// Equality tolerance for residual tests.
    #[arg(long = "tol", default_value_t = 1e-9)]
    eq_tol: f64,
    /// PSD tolerance for eigenvalue tests.
    #[arg(long, default_value_t = 1e-9)]
    psd_tol: f64,
    /// Feasibility tolerance of the semidefinite programs.
    #[arg(long, default_value_t = 1e-7)]
    sdp_tol: f64,
    /// Iteration cap of the semidefinite solver.
    #[arg(long, default_value_t = 50_000)]
    max_iter: usize,
}

impl TolArgs {
    fn build(&self) -> Result<ToleranceConfig, Error> {
        ToleranceConfig::new(self.eq_tol, self.psd_tol, self.sdp_tol, self.max_iter)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Skip {
    Sdp,
    Envelope,
    Triangularize,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full predicate battery on the algebra spanned by the input matrices.
    Analyze {
        /// JSON file `{"ambient": n, "matrices": [...]}` with `[re, im]` entries.
        input: PathBuf,
        #[command(flatten)]
        tol: TolArgs,
        /// Stage to skip (repeatable).
        #[arg(long, value_enum)]
        skip: Vec<Skip>,
        /// Stored in the report.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Compact JSON (default).
        #[arg(long, conflicts_with = "pretty")]
        json: bool,
        /// Indented JSON.
        #[arg(long)]
        pretty: bool,
    },
    /// Regenerate the worked examples and check every stated fact.
    Reproduce {
        /// Restrict to these check groups (repeatable).
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(GROUPS))]
        only: Vec<String>,
        #[command(flatten)]
        tol: TolArgs,
        /// Print the results as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Sample random strictly upper triangular algebras and classify them.
    Search {
        /// Matrix size, 3 or 4.
        #[arg(long, value_parser = clap::value_parser!(u64).range(3..=4))]
        ambient: u64,
        /// Number of random samples.
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest algebra dimension kept.
        #[arg(long, default_value_t = 3)]
        max_dim: usize,
        /// Add Ex1's algebra as an extra sample (ambient 4 only).
        #[arg(long)]
        include_ex1: bool,
        #[command(flatten)]
        tol: TolArgs,
        /// Indented JSON.
        #[arg(long)]
        pretty: bool,
    },
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn to_json<T: serde::Serialize>(v: &T, pretty: bool) -> String {
    let out = if pretty {
        serde_json::to_string_pretty(v)
    } else {
        serde_json::to_string(v)
    };
    out.expect("report types serialize")
}

fn run_analyze(input: PathBuf, tol: TolArgs, skip: Vec<Skip>, seed: u64, pretty: bool) -> ExitCode {
    let tol = match tol.build() {
        Ok(t) => t,
        Err(e) => return fail(EXIT_PARSE, e),
    };
    let text = match std::fs::read_to_string(&input) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_PARSE, format!("{}: {e}", input.display())),
    };
    let (n, mats) = match parse_algebra(&text) {
        Ok(v) => v,
        Err(e) => return fail(EXIT_PARSE, e),
    };
    let alg = match algebra_from_matrices(n, &mats, &tol) {
        Ok(a) => a,
        Err(e @ Error::NotAnAlgebra { .. }) => return fail(EXIT_NOT_ALGEBRA, e),
        Err(e) => return fail(EXIT_PARSE, e),
    };
    let opts = AnalysisOptions {
        skip_sdp: skip.contains(&Skip::Sdp),
        skip_envelope: skip.contains(&Skip::Envelope),
        skip_triangularize: skip.contains(&Skip::Triangularize),
        seed,
    };
    let report = match analyze(&alg, &opts, &tol) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_INTERNAL, e),
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    println!("{}", to_json(&report, pretty));
    if report.nothing_decidable() {
        return fail(EXIT_UNDECIDABLE, "size caps exceeded everywhere; no verdict could be decided");
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze {
            input,
            tol,
            skip,
            seed,
            json: _,
            pretty,
        } => run_analyze(input, tol, skip, seed, pretty),
        Command::Reproduce { only, tol, json } => {
            let tol = match tol.build() {
                Ok(t) => t,
                Err(e) => return fail(EXIT_PARSE, e),
            };
            let only = (!only.is_empty()).then_some(only);
            let report = match reproduce(only.as_deref(), &tol) {
                Ok(r) => r,
                Err(e) => return fail(EXIT_INTERNAL, e),
            };
            if json {
                println!("{}", to_json(&report, true));
            } else {
                print!("{}", report.table());
            }
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                for c in report.failures() {
                    eprintln!("FAIL [{}] {}: {}", c.location, c.description, c.detail);
                }
                ExitCode::from(EXIT_INTERNAL)
            }
        }
        Command::Search {
            ambient,
            trials,
            seed,
            max_dim,
            include_ex1,
            tol,
            pretty,
        } => {
            let tol = match tol.build() {
                Ok(t) => t,
                Err(e) => return fail(EXIT_PARSE, e),
            };
            let cfg = SearchConfig {
                ambient: ambient as usize,
                trials,
                seed,
                max_dim,
                include_ex1,
            };
            match run_search(&cfg, &tol) {
                Ok(s) => {
                    println!("{}", to_json(&s, pretty));
                    ExitCode::SUCCESS
                }
                Err(e @ Error::InvalidInput(_)) => fail(EXIT_PARSE, e),
                Err(e) => fail(EXIT_INTERNAL, e),
            }
        }
    }
}
