//! Command-line front end.
//!
//! Subcommands:
//! - `run <config.json>`: execute an experiment config.
//! - `bounds <name> [--key value ...]`: evaluate a registered calculator,
//!   printing its one-line JSON report.
//! - `estimate --measure <zoo-name|spec.json>`: Poincaré-constant report.
//! - `verify <suite> --seed N [--instances M] ...`: run a registered suite.
//! - `list`: show registered calculators, suites and zoo measures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::calculators;
use crate::config::{ExperimentConfig, MeasureForm, Numerics};
use crate::error::{Error, Result};
use crate::report::fmt_sig;
use crate::runner;
use crate::suites::{self, SuiteParams};
use crate::zoo;

#[derive(Parser)]
#[command(
    name = "poincare-lab",
    about = "Poincaré constants of 1-D measures: estimation, convolution bounds, verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a batch experiment config.
    Run {
        /// Path to the experiment JSON.
        config: PathBuf,
    },
    /// Evaluate a named bound calculator.
    Bounds {
        /// Calculator name (see `list`).
        name: String,
        /// Arguments as `--key value` pairs; values parse as JSON first,
        /// then fall back to strings.
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        args: Vec<String>,
    },
    /// Estimate the Poincaré constant of a measure.
    Estimate(EstimateArgs),
    /// Run a named verification suite.
    Verify(VerifyArgs),
    /// List registered calculators, suites and zoo measures.
    List,
}

#[derive(Args)]
struct EstimateArgs {
    /// Zoo measure name, or a path to a JSON measure spec.
    #[arg(long)]
    measure: String,
    #[arg(long, default_value_t = crate::measures::DEFAULT_N_GRID)]
    n_grid: usize,
    #[arg(long, default_value_t = crate::measures::DEFAULT_WINDOW_SIGMAS)]
    window_sigmas: f64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name (see `list`).
    suite: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Randomized instance count (suite default when omitted).
    #[arg(long)]
    instances: Option<usize>,
    #[arg(long, default_value_t = 4)]
    max_n: usize,
    #[arg(long, default_value_t = 3)]
    max_alphabet: usize,
    #[arg(long, default_value_t = 3)]
    max_k: usize,
    /// Directory for the margin CSV (printed to stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_kv_args(args: &[String]) -> Result<calculators::ArgMap> {
    let mut map = calculators::ArgMap::new();
    let mut iter = args.iter();
    while let Some(key) = iter.next() {
        let key = key
            .strip_prefix("--")
            .ok_or_else(|| Error::Config(format!("expected `--key`, got `{key}`")))?;
        let value = iter
            .next()
            .ok_or_else(|| Error::Config(format!("missing value for `--{key}`")))?;
        let parsed = serde_json::from_str::<serde_json::Value>(value)
            .unwrap_or_else(|_| serde_json::Value::String(value.clone()));
        map.insert(key.to_string(), parsed);
    }
    Ok(map)
}

fn cmd_run(config_path: &PathBuf) -> Result<i32> {
    let config = match ExperimentConfig::from_path(config_path) {
        Ok(c) => c,
        Err(e @ (Error::Json(_) | Error::Config(_) | Error::UnknownName(_))) => {
            eprintln!("config error: {e}");
            return Ok(2);
        }
        Err(e) => return Err(e),
    };
    let summary = runner::run(&config, std::path::Path::new("."))?;
    for task in &summary.tasks {
        let state = if task.ok { "ok" } else { "error" };
        println!("task {:02} {} [{state}]", task.index, task.task);
        if let Some(err) = &task.error {
            println!("    {err}");
        }
    }
    let held = summary.verdicts.iter().filter(|v| v.holds).count();
    println!(
        "verdicts: {held}/{} hold; status {}",
        summary.verdicts.len(),
        summary.status
    );
    Ok(summary.status)
}

fn cmd_bounds(name: &str, raw_args: &[String]) -> Result<i32> {
    let calc = calculators::lookup(name).map_err(|e| {
        eprintln!(
            "known calculators: {}",
            calculators::registry()
                .iter()
                .map(|c| c.name())
                .collect::<Vec<_>>()
                .join(", ")
        );
        e
    })?;
    let args = parse_kv_args(raw_args)?;
    let value = calc.evaluate(&args)?;
    println!("{}", serde_json::to_string(&value)?);
    Ok(0)
}

fn cmd_estimate(args: &EstimateArgs) -> Result<i32> {
    let numerics = Numerics {
        n_grid: args.n_grid,
        window_sigmas: args.window_sigmas,
        ..Numerics::default()
    };
    let mu = if let Some(mu) = zoo::by_name(&args.measure) {
        mu
    } else {
        let body = std::fs::read_to_string(&args.measure).map_err(|e| {
            Error::Config(format!(
                "`{}` is neither a zoo measure nor a readable file: {e}",
                args.measure
            ))
        })?;
        let form: MeasureForm = serde_json::from_str(&body)?;
        form.to_grid(&numerics)?
    };
    let res = crate::spectral::estimate_cp(&mu)?;
    let bracket = crate::spectral::muckenhoupt_bracket(&mu)?;
    let sigma2 = crate::measures::summarize(&mu).variance;
    println!(
        "{}",
        serde_json::to_string(&serde_json::json!({
            "c_p": res.c_p,
            "gap": res.gap,
            "sigma2": sigma2,
            "gradient_variance": res.gradient_variance,
            "n_grid": res.grid_resolution,
            "refinement_estimate": res.refinement_estimate,
            "muckenhoupt": [bracket.lower, bracket.upper],
        }))?
    );
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let suite = suites::lookup(&args.suite).map_err(|e| {
        eprintln!(
            "known suites: {}",
            suites::registry()
                .iter()
                .map(|s| s.name())
                .collect::<Vec<_>>()
                .join(", ")
        );
        e
    })?;
    let params = SuiteParams {
        seed: args.seed,
        instances: args.instances,
        max_n: args.max_n,
        max_alphabet: args.max_alphabet,
        max_k: args.max_k,
    };
    let report = suite.run(&params)?;
    for v in &report.verdicts {
        let state = if v.holds { "PASS" } else { "FAIL" };
        println!(
            "[{state}] {}: lhs {} rhs {} margin {}",
            v.inequality,
            fmt_sig(v.lhs),
            fmt_sig(v.rhs),
            fmt_sig(v.margin)
        );
    }
    match &args.out {
        Some(dir) => {
            let path = dir.join(format!("verify-{}.csv", report.name));
            crate::report::write_csv(&path, &report.table)?;
            println!("margins written to {}", path.display());
        }
        None => {
            print!("{}", report.table.render());
        }
    }
    println!(
        "suite {}: {}",
        report.name,
        if report.pass { "PASS" } else { "FAIL" }
    );
    Ok(if report.pass { 0 } else { 1 })
}

fn cmd_list() -> i32 {
    println!("bound calculators:");
    for calc in calculators::registry() {
        println!("  {:<20} {}", calc.name(), calc.usage());
    }
    println!("verification suites:");
    for suite in suites::registry() {
        println!("  {:<20} {}", suite.name(), suite.describe());
    }
    println!("zoo measures:");
    for (name, _) in zoo::zoo() {
        println!("  {name}");
    }
    0
}

/// Entry point used by the binary.
pub fn run_cli() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run { config } => cmd_run(config),
        Command::Bounds { name, args } => cmd_bounds(name, args),
        Command::Estimate(args) => cmd_estimate(args),
        Command::Verify(args) => cmd_verify(args),
        Command::List => Ok(cmd_list()),
    };
    match outcome {
        Ok(code) => ExitCode::from(code.clamp(0, 255) as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
