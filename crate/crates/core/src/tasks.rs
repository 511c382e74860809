//! Experiment tasks behind a common trait, dispatched by the `task` field of
//! each config entry. `bounds_*` and `verify_*` names route through the
//! calculator and suite registries, so every registered strategy is
//! reachable from a config without extra glue.

use std::path::PathBuf;

use serde_json::Value;

use crate::bounds;
use crate::calculators;
use crate::config::{ExperimentConfig, TaskDecl};
use crate::convolve;
use crate::error::{Error, Result};
use crate::measures::summarize;
use crate::report::{fmt_sig, write_csv, write_json, CsvTable, Verdict};
use crate::spectral;
use crate::suites::{self, SuiteParams};

/// Where a task writes and which formats it should emit.
pub struct TaskContext<'a> {
    pub config: &'a ExperimentConfig,
    pub out_dir: PathBuf,
    pub ordinal: usize,
    pub csv: bool,
    pub json: bool,
}

impl TaskContext<'_> {
    fn artifact_path(&self, decl: &TaskDecl, ext: &str) -> PathBuf {
        let label = decl
            .params
            .get("name")
            .and_then(Value::as_str)
            .map(|s| format!("-{s}"))
            .unwrap_or_default();
        self.out_dir
            .join(format!("{:02}-{}{label}.{ext}", self.ordinal, decl.task))
    }
}

/// Artifacts written and verdicts raised by one task.
#[derive(Debug, Default)]
pub struct TaskOutcome {
    pub verdicts: Vec<Verdict>,
    pub artifacts: Vec<PathBuf>,
}

/// A named, runtime-selectable experiment task.
pub trait Task: Sync {
    fn name(&self) -> &'static str;
    fn run(&self, decl: &TaskDecl, ctx: &TaskContext) -> Result<TaskOutcome>;
}

fn param_usize_list(decl: &TaskDecl, key: &str) -> Result<Vec<usize>> {
    decl.params
        .get(key)
        .cloned()
        .ok_or_else(|| Error::Config(format!("task `{}` needs `{key}`", decl.task)))
        .and_then(|v| serde_json::from_value(v).map_err(Error::from))
}

fn param_f64(decl: &TaskDecl, key: &str, default: f64) -> f64 {
    decl.params.get(key).and_then(Value::as_f64).unwrap_or(default)
}

fn param_measure<'a>(decl: &TaskDecl, ctx: &'a TaskContext) -> Result<&'a crate::config::MeasureDecl> {
    let name = decl
        .params
        .get("measure")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Config(format!("task `{}` needs `measure`", decl.task)))?;
    ctx.config.find_measure(name)
}

/// Estimation report in the stable JSON schema.
#[derive(serde::Serialize)]
struct EstimateReport {
    c_p: f64,
    gap: f64,
    sigma2: f64,
    gradient_variance: f64,
    n_grid: usize,
    refinement_estimate: f64,
    muckenhoupt: [f64; 2],
}

fn estimate_report(mu: &crate::measures::GridMeasure) -> Result<EstimateReport> {
    let res = spectral::estimate_cp(mu)?;
    let bracket = spectral::muckenhoupt_bracket(mu)?;
    Ok(EstimateReport {
        c_p: res.c_p,
        gap: res.gap,
        sigma2: summarize(mu).variance,
        gradient_variance: res.gradient_variance,
        n_grid: res.grid_resolution,
        refinement_estimate: res.refinement_estimate,
        muckenhoupt: [bracket.lower, bracket.upper],
    })
}

struct EstimateTask;

impl Task for EstimateTask {
    fn name(&self) -> &'static str {
        "estimate"
    }

    fn run(&self, decl: &TaskDecl, ctx: &TaskContext) -> Result<TaskOutcome> {
        let measure = param_measure(decl, ctx)?;
        let mu = measure.form.to_grid(&ctx.config.numerics)?;
        let report = estimate_report(&mu)?;
        let mut outcome = TaskOutcome::default();
        if ctx.json {
            let path = ctx.artifact_path(decl, "json");
            write_json(&path, &report)?;
            outcome.artifacts.push(path);
        }
        if ctx.csv {
            let mut table = CsvTable::new(&[
                "c_p",
                "gap",
                "sigma2",
                "gradient_variance",
                "n_grid",
                "refinement_estimate",
                "muckenhoupt_lo",
                "muckenhoupt_hi",
            ]);
            table.push_numbers(&[
                report.c_p,
                report.gap,
                report.sigma2,
                report.gradient_variance,
                report.n_grid as f64,
                report.refinement_estimate,
                report.muckenhoupt[0],
                report.muckenhoupt[1],
            ]);
            let path = ctx.artifact_path(decl, "csv");
            write_csv(&path, &table)?;
            outcome.artifacts.push(path);
        }
        Ok(outcome)
    }
}

struct ConvolveTask;

impl Task for ConvolveTask {
    fn name(&self) -> &'static str {
        "convolve"
    }

    fn run(&self, decl: &TaskDecl, ctx: &TaskContext) -> Result<TaskOutcome> {
        let names: Vec<String> = decl
            .params
            .get("measures")
            .cloned()
            .ok_or_else(|| Error::Config("convolve needs `measures`".into()))
            .and_then(|v| serde_json::from_value(v).map_err(Error::from))?;
        if names.len() < 2 {
            return Err(Error::Config("convolve needs at least two measures".into()));
        }
        let mut acc = ctx
            .config
            .find_measure(&names[0])?
            .form
            .to_grid(&ctx.config.numerics)?;
        let mut constants = vec![spectral::estimate_cp(&acc)?.c_p];
        for name in &names[1..] {
            let next = ctx.config.find_measure(name)?.form.to_grid(&ctx.config.numerics)?;
            constants.push(spectral::estimate_cp(&next)?.c_p);
            acc = convolve::convolve_pair(&acc, &next)?;
        }
        let report = estimate_report(&acc)?;
        let sub_bound: f64 = constants.iter().sum();
        let mut outcome = TaskOutcome::default();
        outcome.verdicts.push(Verdict::new(
            &decl.task,
            &format!("subadditivity for {}", names.join("*")),
            report.c_p,
            sub_bound,
            report.c_p <= sub_bound * (1.0 + 1e-3),
        ));
        if ctx.json {
            let path = ctx.artifact_path(decl, "json");
            write_json(
                &path,
                &serde_json::json!({
                    "measures": names,
                    "component_c_p": constants,
                    "subadditivity_bound": sub_bound,
                    "result": report,
                }),
            )?;
            outcome.artifacts.push(path);
        }
        Ok(outcome)
    }
}

struct CltTraceTask;

impl Task for CltTraceTask {
    fn name(&self) -> &'static str {
        "clt_trace"
    }

    fn run(&self, decl: &TaskDecl, ctx: &TaskContext) -> Result<TaskOutcome> {
        let measure = param_measure(decl, ctx)?;
        let n_list = param_usize_list(decl, "n_list")?;
        let delta2 = param_f64(decl, "delta2", 0.0);
        let base = measure.form.to_clt_base(&ctx.config.numerics)?;
        let trace = convolve::clt_trace(&base, &n_list, delta2)?;

        let bound_example2 = trace.entries[0].c_p;
        let bound_smoothing = if delta2 > 0.0 {
            bounds::smoothing_constant_bound(delta2)?.value
        } else {
            f64::INFINITY
        };

        let mut outcome = TaskOutcome::default();
        if delta2 > 0.0 {
            for e in &trace.entries {
                outcome.verdicts.push(Verdict::new(
                    &decl.task,
                    &format!("c_p(n={}) <= c_p(n=1)", e.n),
                    e.c_p,
                    bound_example2,
                    e.c_p <= bound_example2 + 1e-3,
                ));
                outcome.verdicts.push(Verdict::new(
                    &decl.task,
                    &format!("c_p(n={}) <= smoothing cap", e.n),
                    e.c_p,
                    bound_smoothing,
                    e.c_p <= bound_smoothing,
                ));
            }
        } else {
            for pair in trace.entries.windows(2) {
                outcome.verdicts.push(Verdict::new(
                    &decl.task,
                    &format!("c_p(n={}) <= c_p(n={})", pair[1].n, pair[0].n),
                    pair[1].c_p,
                    pair[0].c_p,
                    pair[1].c_p <= pair[0].c_p + 1e-6,
                ));
            }
        }

        if ctx.csv {
            let mut table = CsvTable::new(&[
                "n",
                "c_p",
                "sigma2",
                "w2_sq",
                "bound_example2",
                "bound_smoothing",
            ]);
            for e in &trace.entries {
                table.push_numbers(&[
                    e.n as f64,
                    e.c_p,
                    e.sigma2,
                    e.w2_to_gaussian * e.w2_to_gaussian,
                    bound_example2,
                    bound_smoothing,
                ]);
            }
            let path = ctx.artifact_path(decl, "csv");
            write_csv(&path, &table)?;
            outcome.artifacts.push(path);
        }
        if ctx.json {
            let entries: Vec<Value> = trace
                .entries
                .iter()
                .map(|e| {
                    serde_json::json!({
                        "n": e.n,
                        "c_p": e.c_p,
                        "sigma2": e.sigma2,
                        "w2_sq": e.w2_to_gaussian * e.w2_to_gaussian,
                    })
                })
                .collect();
            let path = ctx.artifact_path(decl, "json");
            write_json(
                &path,
                &serde_json::json!({
                    "delta2": delta2,
                    "bound_example2": bound_example2,
                    "bound_smoothing": if bound_smoothing.is_finite() {
                        Value::from(bound_smoothing)
                    } else {
                        Value::Null
                    },
                    "entries": entries,
                }),
            )?;
            outcome.artifacts.push(path);
        }
        Ok(outcome)
    }
}

/// `bounds_<calculator>`: evaluate a registered calculator and write the
/// one-line report.
struct BoundsTask;

impl Task for BoundsTask {
    fn name(&self) -> &'static str {
        "bounds_*"
    }

    fn run(&self, decl: &TaskDecl, ctx: &TaskContext) -> Result<TaskOutcome> {
        let calc_name = decl
            .task
            .strip_prefix("bounds_")
            .ok_or_else(|| Error::UnknownName(decl.task.clone()))?;
        let calc = calculators::lookup(calc_name)?;
        let value = calc.evaluate(&decl.params)?;
        let mut outcome = TaskOutcome::default();
        if let Some(satisfied) = value.get("satisfied").and_then(Value::as_bool) {
            outcome.verdicts.push(Verdict::new(
                &decl.task,
                calc_name,
                value.get("value").and_then(Value::as_f64).unwrap_or(f64::NAN),
                f64::NAN,
                satisfied,
            ));
        }
        if ctx.json {
            let path = ctx.artifact_path(decl, "json");
            write_json(&path, &value)?;
            outcome.artifacts.push(path);
        }
        Ok(outcome)
    }
}

/// `verify_<suite>`: run a registered suite with the config seed.
struct VerifyTask;

impl Task for VerifyTask {
    fn name(&self) -> &'static str {
        "verify_*"
    }

    fn run(&self, decl: &TaskDecl, ctx: &TaskContext) -> Result<TaskOutcome> {
        let suite_name = decl
            .task
            .strip_prefix("verify_")
            .ok_or_else(|| Error::UnknownName(decl.task.clone()))?;
        let suite = suites::lookup(suite_name)?;
        let defaults = SuiteParams::default();
        let params = SuiteParams {
            seed: ctx.config.numerics.seed.unwrap_or(defaults.seed),
            instances: decl
                .params
                .get("instances")
                .and_then(Value::as_u64)
                .map(|v| v as usize),
            max_n: decl
                .params
                .get("max_n")
                .and_then(Value::as_u64)
                .map(|v| v as usize)
                .unwrap_or(defaults.max_n),
            max_alphabet: decl
                .params
                .get("max_alphabet")
                .and_then(Value::as_u64)
                .map(|v| v as usize)
                .unwrap_or(defaults.max_alphabet),
            max_k: decl
                .params
                .get("max_k")
                .and_then(Value::as_u64)
                .map(|v| v as usize)
                .unwrap_or(defaults.max_k),
        };
        let report = suite.run(&params)?;
        let mut outcome = TaskOutcome {
            verdicts: report.verdicts.clone(),
            artifacts: Vec::new(),
        };
        if ctx.csv {
            let path = ctx.artifact_path(decl, "csv");
            write_csv(&path, &report.table)?;
            outcome.artifacts.push(path);
        }
        if ctx.json {
            let path = ctx.artifact_path(decl, "json");
            write_json(
                &path,
                &serde_json::json!({
                    "suite": report.name,
                    "pass": report.pass,
                    "verdicts": report.verdicts,
                }),
            )?;
            outcome.artifacts.push(path);
        }
        Ok(outcome)
    }
}

static TASKS: &[&dyn Task] = &[&EstimateTask, &ConvolveTask, &CltTraceTask];

/// Resolve a task name: exact names first, then the `bounds_*` / `verify_*`
/// prefix strategies.
pub fn lookup(name: &str) -> Result<&'static dyn Task> {
    if let Some(task) = TASKS.iter().find(|t| t.name() == name) {
        return Ok(*task);
    }
    if name.starts_with("bounds_") {
        return Ok(&BoundsTask);
    }
    if name.starts_with("verify_") {
        return Ok(&VerifyTask);
    }
    Err(Error::UnknownName(name.to_string()))
}

/// Names of the directly registered tasks plus the two prefix families.
pub fn known_tasks() -> Vec<String> {
    let mut names: Vec<String> = TASKS.iter().map(|t| t.name().to_string()).collect();
    names.extend(
        calculators::registry()
            .iter()
            .map(|c| format!("bounds_{}", c.name())),
    );
    names.extend(
        suites::registry()
            .iter()
            .map(|s| format!("verify_{}", s.name())),
    );
    names
}
