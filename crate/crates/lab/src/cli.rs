//! Argument parsing, dispatch and report emission.
//!
//! Every successful run prints one JSON document
//! `{command, config, result, residuals, wallTimeMs}`. Exit codes: 0 for
//! success, 1 for input, contract or numerical errors (with a one-line
//! JSON error object on standard error), 2 when a checked inequality is
//! violated.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gruss_core::distance::{delta, DeltaMethod};
use gruss_core::harness::{self, Check, Family, TrialConfig};
use gruss_core::linalg::operator_norm;
use gruss_core::matrix::vec_norm;
use gruss_core::posmap::{n_positivity_search, DEFAULT_MAX_ITERS, DEFAULT_STARTS};
use gruss_core::stinespring::{dilate, homomorphism_check};
use gruss_core::unitary_sum::{decompose_unitary_sum, Mode};
use serde::Serialize;
use serde_json::{json, Value};

use crate::io::{read_map, read_matrix, LabError, LabResult};
use crate::runner;

#[derive(Parser, Debug)]
#[command(name = "gruss-lab", version, about = "Grüss-inequality lab for unital n-positive maps")]
pub struct Cli {
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Distance of a matrix from the scalars.
    Delta(DeltaArgs),
    /// Grüss defect and bound for one (map, A, B).
    Defect(DefectArgs),
    /// Randomized verification suites.
    Verify(VerifyArgs),
    /// The transpose-map counterexample on M_2.
    Counterexample,
    /// n-positivity witness search.
    Npositive(NpositiveArgs),
    /// Write a matrix as a mean of unitaries.
    Decompose(DecomposeArgs),
    /// Stinespring dilation of a unital CP map.
    Dilate(DilateArgs),
    /// Exploratory runs without pass/fail semantics.
    Explore {
        #[command(subcommand)]
        target: ExploreTarget,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Auto,
    Disk,
    Convex,
    Grid,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DeltaArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: MethodArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DefectArgs {
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    /// Absolute violation tolerance; defaults to 1e-8·(1 + bound).
    #[arg(long)]
    pub viol_tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckArg {
    Theorem,
    Lemma1,
    Lemma2,
    Corollary,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Cp,
    Choi,
    Mixed,
    /// Positive non-CP maps; lemma2 only.
    Positive,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub check: CheckArg,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "cp")]
    pub family: FamilyArg,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NpositiveArgs {
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_STARTS)]
    pub starts: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Strict,
    Relaxed,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DecomposeArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub m: usize,
    #[arg(long, value_enum, default_value = "strict")]
    pub mode: ModeArg,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DilateArgs {
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "camelCase", tag = "target")]
pub enum ExploreTarget {
    /// Defect/bound ratios for 2-positive maps on M_3.
    TwoPositive {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// What a run printed and how it exited.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Done {
    command: &'static str,
    config: Value,
    result: Value,
    residuals: Value,
    violation: bool,
    failure: Option<String>,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn error_line(kind: &str, message: &str) -> String {
    let one_line = message.lines().map(str::trim).filter(|l| !l.is_empty()).collect::<Vec<_>>().join(" ");
    json!({ "error": { "kind": kind, "message": one_line } }).to_string()
}

fn verify_config(args: &VerifyArgs) -> TrialConfig {
    TrialConfig {
        family: match args.family {
            FamilyArg::Cp => Family::Cp,
            FamilyArg::Choi => Family::Choi,
            FamilyArg::Mixed => Family::Mixed,
            FamilyArg::Positive => Family::Positive,
        },
        dims: args.dims.clone(),
        trials: args.trials,
        seed: args.seed,
        check: match args.check {
            CheckArg::Theorem => Check::Theorem,
            CheckArg::Lemma1 => Check::Lemma1,
            CheckArg::Lemma2 => Check::Lemma2,
            CheckArg::Corollary => Check::Corollary,
        },
    }
}

fn execute(command: &Command) -> LabResult<Done> {
    let done = |command, config, result, residuals| Done {
        command,
        config,
        result,
        residuals,
        violation: false,
        failure: None,
    };
    match command {
        Command::Delta(args) => {
            let c = read_matrix(&args.matrix)?;
            let method = match args.method {
                MethodArg::Auto => DeltaMethod::Auto,
                MethodArg::Disk => DeltaMethod::Disk,
                MethodArg::Convex => DeltaMethod::Convex,
                MethodArg::Grid => DeltaMethod::Grid,
            };
            let r = delta(&c, method, args.seed)?;
            let achieved = (operator_norm(&c.shift(r.minimizer)?) - r.value).abs();
            Ok(done("delta", to_value(args), to_value(&r), json!({ "achieved": achieved })))
        }
        Command::Defect(args) => {
            let map = read_map(&args.map)?;
            let (a, b) = (read_matrix(&args.a)?, read_matrix(&args.b)?);
            let r = harness::check_theorem(&map, &a, &b, args.viol_tol)?;
            let residuals = json!({
                "unital": map.unital_residual(),
                "recomputedDefect": (harness::gruss_defect(&map, &a, &b)? - r.defect).abs(),
            });
            let mut d = done("defect", to_value(args), to_value(&r), residuals);
            d.violation = r.violated;
            Ok(d)
        }
        Command::Verify(args) => {
            let config = verify_config(args);
            let s = runner::run_trials(&config, runner::threads_from_env()?)?;
            let mut d = done("verify", to_value(args), to_value(&s), json!({ "sideWorst": s.side_worst }));
            d.violation = s.violations > 0;
            Ok(d)
        }
        Command::Counterexample => {
            let r = harness::reproduce_counterexample();
            let residuals = json!({
                "defect": (r.defect - 6.0).abs(),
                "deltaA": (r.delta_a - 2.5).abs(),
                "deltaB": (r.delta_b - 1.5).abs(),
                "bound": (r.bound - 3.75).abs(),
            });
            let reproduced = [r.defect - 6.0, r.delta_a - 2.5, r.delta_b - 1.5, r.bound - 3.75]
                .iter()
                .all(|e| e.abs() <= 1e-9)
                && r.inequality_fails;
            let mut d = done("counterexample", json!({}), to_value(&r), residuals);
            if !reproduced {
                d.failure = Some("counterexample numbers were not reproduced".into());
            }
            Ok(d)
        }
        Command::Npositive(args) => {
            let map = read_map(&args.map)?;
            let v = n_positivity_search(&map, args.n, args.starts, args.max_iters, args.seed)?;
            let residuals = match &v.witness {
                Some(w) => json!({
                    "witnessNorm": (vec_norm(&w.vector()) - 1.0).abs(),
                    "witnessReplay": (w.rayleigh(&map.choi_matrix()) - v.min_value_found).abs(),
                }),
                None => json!({}),
            };
            Ok(done("npositive", to_value(args), to_value(&v), residuals))
        }
        Command::Decompose(args) => {
            let a = read_matrix(&args.matrix)?;
            let mode = match args.mode {
                ModeArg::Strict => Mode::Strict,
                ModeArg::Relaxed => Mode::Relaxed,
            };
            let r = decompose_unitary_sum(&a, args.m, mode)?;
            let residuals =
                json!({ "unitarity": r.unitarity_residual(), "reconstruction": r.reconstruction_error });
            Ok(done("decompose", to_value(args), to_value(&r), residuals))
        }
        Command::Dilate(args) => {
            let map = read_map(&args.map)?;
            let dil = dilate(&map)?;
            let h = homomorphism_check(&dil, args.samples, args.seed);
            let result = json!({
                "envDim": dil.env_dim,
                "piDim": dil.pi_dim,
                "isometryResidual": dil.isometry_residual(),
                "maxDilationResidual": h.dilation,
                "homomorphism": h,
                "isometry": dil.isometry,
            });
            let residuals = json!({
                "isometry": dil.isometry_residual(),
                "dilation": h.dilation,
                "multiplicativity": h.multiplicativity,
            });
            Ok(done("dilate", to_value(args), result, residuals))
        }
        Command::Explore { target } => match target {
            ExploreTarget::TwoPositive { trials, seed } => {
                let config = harness::two_positive_config(*trials, *seed);
                let s = runner::run_trials(&config, runner::threads_from_env()?)?;
                Ok(done("explore", to_value(target), to_value(&s), json!({ "worstRatio": s.worst_ratio })))
            }
        },
    }
}

/// Parses `argv` (including the program name), runs the command and
/// returns what would be printed.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Outcome { code: 0, stdout: e.render().to_string(), stderr: String::new() }
                }
                _ => Outcome { code: 1, stdout: String::new(), stderr: error_line("usage", &e.render().to_string()) },
            };
        }
    };
    let start = Instant::now();
    let done = match execute(&cli.command) {
        Ok(d) => d,
        Err(e) => return Outcome { code: 1, stdout: String::new(), stderr: error_line(e.kind(), &e.to_string()) },
    };
    let report = json!({
        "command": done.command,
        "config": done.config,
        "result": done.result,
        "residuals": done.residuals,
        "wallTimeMs": start.elapsed().as_millis() as u64,
    });
    let text = serde_json::to_string_pretty(&report).expect("reports serialize") + "\n";
    let mut out = Outcome { code: 0, stdout: text, stderr: String::new() };
    if let Some(path) = &cli.output {
        if let Err(e) = fs::write(path, &out.stdout) {
            let err = LabError::Io { path: path.clone(), message: e.to_string() };
            return Outcome { code: 1, stdout: String::new(), stderr: error_line(err.kind(), &err.to_string()) };
        }
        out.stdout.clear();
    }
    if let Some(msg) = done.failure {
        out.code = 1;
        out.stderr = error_line("reproduction", &msg);
    } else if done.violation {
        out.code = 2;
    }
    out
}
