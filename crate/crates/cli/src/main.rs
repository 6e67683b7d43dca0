//! Command-line front end: generate polytopes, compute operator bodies,
//! evaluate them, and run the identity suites.
//!
//! Exit codes: 0 success / all suites passed, 1 suite failure,
//! 2 usage or parse error, 3 precondition violation.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lpproj_core::ops::{self, OperatorKind};
use lpproj_core::rational::{rat, Vector};
use lpproj_core::verify::{self, Config};
use lpproj_core::{Error, Polytope, SignedLpFunction};

#[derive(Parser)]
#[command(name = "lpproj", version, about = "Asymmetric L_p projection bodies of polytopes")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute an operator body for a polytope JSON file.
    Body {
        /// Operator: pi-plus, pi-minus, pi-plus-pos, pi-minus-pos,
        /// pi-plus-neg, pi-minus-neg, delta-plus, delta-minus.
        #[arg(long)]
        op: String,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long = "in")]
        input: PathBuf,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a stored body at a direction.
    Eval {
        #[arg(long = "in")]
        input: PathBuf,
        /// Comma-separated coordinates, e.g. 1,0,0.
        #[arg(long, allow_hyphen_values = true)]
        dir: String,
    },
    /// Run an identity suite and print one CheckReport JSON per line.
    Verify {
        /// One of: valuation, inclusion-exclusion, contravariance,
        /// gl-law, homogeneity, functional-eq, simplicity,
        /// simple-decomposition, classification, all.
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 50)]
        cases: usize,
        #[arg(long, env = "LPPROJ_SEED", default_value_t = 0)]
        seed: u64,
        /// Override the suite's own tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Negative control: run the deliberately corrupted operator.
        #[arg(long)]
        corrupted: bool,
    },
    /// Write a polytope JSON file.
    Gen {
        /// One of: simplex, shifted-simplex, probe-simplex, cube,
        /// random, random-o.
        #[arg(long)]
        shape: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, env = "LPPROJ_SEED", default_value_t = 0)]
        seed: u64,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_json(path: &PathBuf) -> Result<serde_json::Value, Error> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, value: &serde_json::Value) -> Result<(), Error> {
    let text = format!("{}\n", serde_json::to_string_pretty(value).expect("serializable"));
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_body(op: &str, p: f64, input: &PathBuf, out: &Option<PathBuf>) -> Result<u8, Error> {
    let kind = OperatorKind::parse(op)?;
    let poly = Polytope::from_json(&read_json(input)?)?;
    let body = ops::apply(kind, &poly, p)?;
    emit(out, &body.to_json())?;
    Ok(0)
}

fn cmd_eval(input: &PathBuf, dir: &str) -> Result<u8, Error> {
    let body = SignedLpFunction::from_json(&read_json(input)?)?;
    let u: Vec<f64> = dir
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("direction component {c:?}: {e}")))
        })
        .collect::<Result<_, _>>()?;
    // 15 significant digits.
    println!("{:.14e}", body.s_eval(&u)?);
    Ok(0)
}

fn cmd_verify(
    suite: &str,
    n: usize,
    p: f64,
    cases: usize,
    seed: u64,
    tol: Option<f64>,
    corrupted: bool,
) -> Result<u8, Error> {
    if !(suite == "all" || verify::SUITES.contains(&suite)) {
        return Err(Error::Parse(format!("unknown suite {suite:?}")));
    }
    if (suite == "classification" || suite == "all") && n < 3 {
        return Err(Error::Parse(format!(
            "the classification suite requires n >= 3, got {n}"
        )));
    }
    let cfg = Config { n, p, cases, seed, tol };
    let reports = if corrupted {
        verify::run_suite_with(suite, &cfg, &verify::corrupted_apply)?
    } else {
        verify::run_suite(suite, &cfg)?
    };
    let mut all_passed = true;
    for r in &reports {
        println!("{}", serde_json::to_string(&r.to_json()).expect("serializable"));
        all_passed &= r.passed;
    }
    Ok(if all_passed { 0 } else { 1 })
}

fn cmd_gen(shape: &str, n: usize, seed: u64, out: &Option<PathBuf>) -> Result<u8, Error> {
    let poly = match shape {
        "simplex" => Polytope::standard_simplex(n)?,
        "shifted-simplex" => Polytope::shifted_simplex(n)?,
        "probe-simplex" => Polytope::probe_simplex(n)?,
        "cube" => {
            let mut pts = Vec::new();
            for mask in 0..(1u64 << n) {
                pts.push(Vector(
                    (0..n).map(|i| rat(((mask >> i) & 1) as i64)).collect(),
                ));
            }
            Polytope::convex_hull(n, &pts)?
        }
        "random" => verify::random_polytope(n, &mut verify::case_rng(seed, 0), false)?,
        "random-o" => verify::random_polytope(n, &mut verify::case_rng(seed, 0), true)?,
        other => return Err(Error::Parse(format!("unknown shape {other:?}"))),
    };
    emit(out, &poly.to_json())?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Error> {
    match &cli.cmd {
        Cmd::Body { op, p, input, out } => cmd_body(op, *p, input, out),
        Cmd::Eval { input, dir } => cmd_eval(input, dir),
        Cmd::Verify { suite, n, p, cases, seed, tol, corrupted } => {
            cmd_verify(suite, *n, *p, *cases, *seed, *tol, *corrupted)
        }
        Cmd::Gen { shape, n, seed, out } => cmd_gen(shape, *n, *seed, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Parse(_) | Error::DimensionMismatch { .. } => 2,
                Error::Precondition(_) => 3,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}
