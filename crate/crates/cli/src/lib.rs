//! Subcommand implementations for the `stepcover` binary.
//!
//! Every subcommand produces text (JSON, CSV or SVG) that is written to
//! stdout or to `--out`. Failures carry an exit code per failure class.

pub mod render;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use stepcover::rational::{self, Rational};
use stepcover::search::{fit_lower_bound_search_from, FitEstimate};
use stepcover::solvers::{branch_and_bound_with, brute_force_with, SolverConfig, DEFAULT_BRUTE_FORCE_LIMIT};
use stepcover::{
    alternating_range, build_extremal, certify_upper_bound, evaluate_folding, fit_monotonicity_check,
    greedy_fold, merge_reduce, pipeline, verify_lower_bound, Error, RulerInstance, SignVector,
};
use thiserror::Error;

pub use render::{render_svg, RenderOptions};

/// Default seed for randomized subcommands.
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Parser)]
#[command(name = "stepcover", version, about = "Exact hinged-ruler folding: step-covers, extremal instances, certificates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact step-cover of an instance file
    Solve(SolveArgs),
    /// Greedy folding with every prefix sum in [-1, 1]
    Greedy(InputArgs),
    /// Build (and optionally verify) the extremal instance for m
    Extremal(ExtremalArgs),
    /// Fringe-mass certificate for an instance with n = 4m
    Certify(CertifyArgs),
    /// Densities of the walk pipeline
    Density(DensityArgs),
    /// Heuristic search for hard instances (lower bounds on the fit)
    Search(SearchArgs),
    /// Draw a folding as SVG
    Render(RenderArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Instance JSON: {"lengths": ["7/10", "0", ...]}
    #[arg(long)]
    pub input: PathBuf,
    /// Write output here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub io: InputArgs,
    /// Largest n solved by exhaustive search; larger instances use branch and bound
    #[arg(long, default_value_t = DEFAULT_BRUTE_FORCE_LIMIT)]
    pub limit: usize,
    /// Always use branch and bound
    #[arg(long)]
    pub bnb: bool,
    /// Cap on branch-and-bound search nodes
    #[arg(long)]
    pub max_nodes: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ExtremalArgs {
    #[arg(long)]
    pub m: u32,
    /// Enumerate every folding and report the range census
    #[arg(long)]
    pub verify: bool,
    /// Brute-force size limit for --verify
    #[arg(long, default_value_t = DEFAULT_BRUTE_FORCE_LIMIT)]
    pub limit: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub io: InputArgs,
    /// Override epsilon (default 1/(2^(m+3) - 7))
    #[arg(long, value_parser = parse_rational)]
    pub epsilon: Option<Rational>,
    /// Apply merge_reduce before certifying
    #[arg(long)]
    pub reduce: bool,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub io: InputArgs,
    /// Emit only q_index
    #[arg(long)]
    pub index: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Size, or an inclusive range such as 3-8
    #[arg(long)]
    pub n: String,
    #[arg(long, default_value_t = 10_000)]
    pub budget: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Emit CSV instead of JSON lines
    #[arg(long)]
    pub csv: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Sign string such as "--+++-+"
    #[arg(long, allow_hyphen_values = true)]
    pub signs: String,
    /// Evenly spaced levels instead of true scale
    #[arg(long)]
    pub schematic: bool,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    rational::parse(s).map_err(|e| e.to_string())
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("certificate does not hold: total fringe mass {0} exceeds 1")]
    CertificateFails(String),
}

impl CliError {
    /// 1 I/O, 3 parse, 4 precondition, 5 size limit, 6 failed certificate.
    /// Usage errors exit with 2 from the argument parser.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Core(Error::Parse(_)) => 3,
            CliError::Core(Error::InvalidInput(_)) => 4,
            CliError::Core(Error::SizeLimit(_)) => 5,
            CliError::CertificateFails(_) => 6,
        }
    }
}

/// What a subcommand produced.
pub struct Output {
    pub text: String,
    pub path: Option<PathBuf>,
    /// Set when the run completed but its verdict is negative.
    pub failure: Option<CliError>,
}

impl Output {
    fn new(text: String, path: Option<PathBuf>) -> Self {
        Output { text, path, failure: None }
    }
}

pub fn read_instance(path: &Path) -> Result<RulerInstance, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(RulerInstance::from_json(&text)?)
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn run(command: Command) -> Result<Output, CliError> {
    match command {
        Command::Solve(args) => solve(args),
        Command::Greedy(args) => {
            let a = read_instance(&args.input)?;
            let (signs, eval) = greedy_fold(&a);
            let v = json!({ "n": a.len(), "signs": signs, "evaluation": eval });
            Ok(Output::new(to_json(&v), args.out))
        }
        Command::Extremal(args) => extremal(args),
        Command::Certify(args) => certify(args),
        Command::Density(args) => density(args),
        Command::Search(args) => search(args),
        Command::Render(args) => {
            let a = read_instance(&args.input)?;
            let signs: SignVector = args.signs.parse()?;
            let eval = evaluate_folding(&a, &signs)?;
            let svg = render_svg(&a, &signs, &eval, RenderOptions { schematic: args.schematic });
            Ok(Output::new(svg, Some(args.out)))
        }
    }
}

fn solve(args: SolveArgs) -> Result<Output, CliError> {
    let a = read_instance(&args.io.input)?;
    let config = SolverConfig {
        brute_force_limit: args.limit,
        max_nodes: args.max_nodes,
    };
    let (method, result) = if args.bnb || a.len() > args.limit {
        ("branch-and-bound", branch_and_bound_with(&a, &config)?)
    } else {
        ("brute-force", brute_force_with(&a, &config)?)
    };
    let v = json!({
        "n": a.len(),
        "method": method,
        "value": rational::format(&result.value),
        "witness": result.witness,
        "explored": result.explored,
    });
    Ok(Output::new(to_json(&v), args.io.out))
}

fn extremal(args: ExtremalArgs) -> Result<Output, CliError> {
    let ext = build_extremal(args.m)?;
    let mut v = json!({
        "m": ext.m,
        "n": ext.instance.len(),
        "delta": rational::format(&ext.delta),
        "target": rational::format(&ext.target()),
        "alternating_range": rational::format(&alternating_range(&ext)),
        "lengths": serde_json::to_value(&ext.instance).expect("serializable")["lengths"].clone(),
    });
    if args.verify {
        let config = SolverConfig {
            brute_force_limit: args.limit,
            max_nodes: None,
        };
        let report = verify_lower_bound(&ext, &config)?;
        v["verification"] = serde_json::to_value(&report).expect("serializable");
    }
    Ok(Output::new(to_json(&v), args.out))
}

fn certify(args: CertifyArgs) -> Result<Output, CliError> {
    let mut a = read_instance(&args.io.input)?;
    if args.reduce {
        a = merge_reduce(&a);
    }
    let cert = certify_upper_bound(&a, args.epsilon.as_ref())?;
    let mut out = Output::new(to_json(&cert), args.io.out);
    if !cert.holds {
        out.failure = Some(CliError::CertificateFails(rational::format(&cert.total)));
    }
    Ok(out)
}

fn density(args: DensityArgs) -> Result<Output, CliError> {
    let a = read_instance(&args.io.input)?;
    let qs = pipeline(&a)?;
    let v: Value = match args.index {
        Some(i) => {
            let q = qs.get(i).ok_or_else(|| {
                Error::InvalidInput(format!("index {i} is outside 0..={}", qs.len() - 1))
            })?;
            let mut v = serde_json::to_value(q).expect("serializable");
            v["index"] = json!(i);
            v
        }
        None => {
            let densities: Vec<Value> = qs
                .iter()
                .enumerate()
                .map(|(i, q)| {
                    let mut v = serde_json::to_value(q).expect("serializable");
                    v["index"] = json!(i);
                    v
                })
                .collect();
            json!({ "m": a.len() / 4, "densities": densities })
        }
    };
    Ok(Output::new(to_json(&v), args.io.out))
}

fn parse_sizes(spec: &str) -> Result<Vec<usize>, Error> {
    let bad = || Error::Parse(format!("expected N or A-B for --n, got {spec:?}"));
    let (lo, hi) = match spec.split_once('-') {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let n = spec.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if lo == 0 || lo > hi {
        return Err(Error::InvalidInput(format!("empty or zero size range {spec:?}")));
    }
    Ok((lo..=hi).collect())
}

#[derive(Serialize)]
struct SearchRow<'a> {
    n: usize,
    best_value: String,
    best_instance: &'a RulerInstance,
    method: stepcover::SearchMethod,
    iterations: u64,
    seed: u64,
}

fn search(args: SearchArgs) -> Result<Output, CliError> {
    let sizes = parse_sizes(&args.n)?;
    let mut estimates: Vec<FitEstimate> = Vec::new();
    for &n in &sizes {
        // seed each size with the previous champion padded by one zero
        let extra: Vec<RulerInstance> = estimates
            .last()
            .map(|e| stepcover::pad_with_zeros(&e.best_instance, 1))
            .into_iter()
            .collect();
        estimates.push(fit_lower_bound_search_from(n, args.budget, args.seed, &extra)?);
    }
    let report = fit_monotonicity_check(&estimates)?;
    if !report.upper_bound_violations.is_empty() {
        return Err(Error::InvalidInput(format!(
            "estimates for n = {:?} exceed the proven upper bound; the solver is inconsistent",
            report.upper_bound_violations
        ))
        .into());
    }
    let mut text = String::new();
    if args.csv {
        text.push_str("n,best_value,best_instance,method,iterations,seed\n");
    }
    for e in &report.estimates {
        let row = SearchRow {
            n: e.n,
            best_value: rational::format(&e.best_value),
            best_instance: &e.best_instance,
            method: e.method,
            iterations: e.iterations,
            seed: e.seed,
        };
        if args.csv {
            let lengths: Vec<String> = e.best_instance.lengths().iter().map(rational::format).collect();
            let method = serde_json::to_value(e.method).expect("serializable");
            text.push_str(&format!(
                "{},{},{},{},{},{}\n",
                e.n,
                row.best_value,
                lengths.join(" "),
                method.as_str().unwrap_or_default(),
                e.iterations,
                e.seed
            ));
        } else {
            text.push_str(&serde_json::to_string(&row).expect("serializable"));
            text.push('\n');
        }
    }
    Ok(Output::new(text, args.out))
}

/// Writes the output where requested.
pub fn emit(output: &Output) -> Result<(), CliError> {
    match &output.path {
        Some(path) => fs::write(path, &output.text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{}", output.text);
            Ok(())
        }
    }
}
