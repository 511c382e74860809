//! Batch execution of an experiment config: run every task, collect
//! verdicts, and write `summary.json`.
//!
//! Independent tasks run concurrently on a small worker pool capped by
//! `POINCARE_LAB_THREADS`; the summary is assembled single-threaded in
//! declaration order afterwards, so output is deterministic.

use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::report::{write_json, Verdict};
use crate::tasks::{self, TaskContext, TaskOutcome};

/// Environment variable capping task parallelism.
pub const THREADS_ENV: &str = "POINCARE_LAB_THREADS";

#[derive(Debug, Serialize)]
pub struct TaskSummary {
    pub index: usize,
    pub task: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub artifacts: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub status: i32,
    pub numerics: NumericsEcho,
    pub tasks: Vec<TaskSummary>,
    pub verdicts: Vec<Verdict>,
}

/// Numerics block echoed into every summary so reports are reproducible
/// from the file alone.
#[derive(Debug, Serialize)]
pub struct NumericsEcho {
    pub n_grid: usize,
    pub window_sigmas: f64,
    pub w2_nodes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn thread_cap() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Run every task; returns the summary after writing artifacts and
/// `summary.json` under the output directory.
pub fn run(config: &ExperimentConfig, base_dir: &Path) -> Result<RunSummary> {
    let out_dir: PathBuf = base_dir.join(&config.output.directory);
    std::fs::create_dir_all(&out_dir)?;
    let csv = config.output.formats.iter().any(|f| f == "csv");
    let json = config.output.formats.iter().any(|f| f == "json");

    let total = config.tasks.len();
    let results: Mutex<Vec<Option<std::result::Result<TaskOutcome, String>>>> =
        Mutex::new((0..total).map(|_| None).collect());
    let next: Mutex<usize> = Mutex::new(0);

    let workers = thread_cap().min(total.max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = {
                    let mut guard = next.lock().unwrap();
                    if *guard >= total {
                        return;
                    }
                    let i = *guard;
                    *guard += 1;
                    i
                };
                let decl = &config.tasks[index];
                let ctx = TaskContext {
                    config,
                    out_dir: out_dir.clone(),
                    ordinal: index,
                    csv,
                    json,
                };
                let outcome = tasks::lookup(&decl.task)
                    .and_then(|task| task.run(decl, &ctx))
                    .map_err(|e| e.to_string());
                results.lock().unwrap()[index] = Some(outcome);
            });
        }
    });

    let mut task_summaries = Vec::with_capacity(total);
    let mut verdicts = Vec::new();
    let mut any_error = false;
    for (index, slot) in results.into_inner().unwrap().into_iter().enumerate() {
        let decl = &config.tasks[index];
        match slot.expect("every task ran") {
            Ok(outcome) => {
                task_summaries.push(TaskSummary {
                    index,
                    task: decl.task.clone(),
                    ok: true,
                    error: None,
                    artifacts: outcome
                        .artifacts
                        .iter()
                        .map(|p| p.display().to_string())
                        .collect(),
                });
                verdicts.extend(outcome.verdicts);
            }
            Err(message) => {
                any_error = true;
                task_summaries.push(TaskSummary {
                    index,
                    task: decl.task.clone(),
                    ok: false,
                    error: Some(message),
                    artifacts: Vec::new(),
                });
            }
        }
    }

    let all_hold = verdicts.iter().all(|v| v.holds);
    let status = if any_error {
        1
    } else if all_hold {
        0
    } else {
        1
    };
    let summary = RunSummary {
        status,
        numerics: NumericsEcho {
            n_grid: config.numerics.n_grid,
            window_sigmas: config.numerics.window_sigmas,
            w2_nodes: config.numerics.w2_nodes,
            seed: config.numerics.seed,
        },
        tasks: task_summaries,
        verdicts,
    };
    write_json(&out_dir.join("summary.json"), &summary)?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_task_list_is_status_zero() {
        let dir = tempdir();
        let config = ExperimentConfig::from_json(
            r#"{"tasks": [], "output": {"directory": "out"}}"#,
        )
        .unwrap();
        let summary = run(&config, &dir).unwrap();
        assert_eq!(summary.status, 0);
        assert!(summary.verdicts.is_empty());
        assert!(dir.join("out/summary.json").exists());
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn unknown_task_yields_status_one_with_partial_reports() {
        let dir = tempdir();
        let config = ExperimentConfig::from_json(
            r#"{
                "tasks": [
                    {"task": "bounds_rate_explicit", "n": 7},
                    {"task": "no_such_task"}
                ],
                "output": {"directory": "out"}
            }"#,
        )
        .unwrap();
        let summary = run(&config, &dir).unwrap();
        assert_eq!(summary.status, 1);
        assert!(summary.tasks[0].ok);
        assert!(!summary.tasks[1].ok);
        assert!(!summary.tasks[0].artifacts.is_empty());
        std::fs::remove_dir_all(&dir).unwrap();
    }

    fn tempdir() -> PathBuf {
        let dir = std::env::temp_dir().join(format!(
            "plab-runner-{}-{:?}",
            std::process::id(),
            std::thread::current().id()
        ));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }
}
