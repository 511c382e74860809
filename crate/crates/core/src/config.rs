//! Experiment configuration: measure declarations, task list, numerics.

use serde::Deserialize;

use crate::convolve::CltBase;
use crate::error::{Error, Result};
use crate::measures::{
    materialize, DiscreteAtoms, GaussianMixtureSpec, GridMeasure, MaterializeSpec,
};
use crate::zoo;

/// Numeric defaults shared by tasks.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numerics {
    #[serde(default = "default_n_grid")]
    pub n_grid: usize,
    #[serde(default = "default_window_sigmas")]
    pub window_sigmas: f64,
    #[serde(default = "default_w2_nodes")]
    pub w2_nodes: usize,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_n_grid() -> usize {
    crate::measures::DEFAULT_N_GRID
}

fn default_window_sigmas() -> f64 {
    crate::measures::DEFAULT_WINDOW_SIGMAS
}

fn default_w2_nodes() -> usize {
    crate::transport::DEFAULT_W2_NODES
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics {
            n_grid: default_n_grid(),
            window_sigmas: default_window_sigmas(),
            w2_nodes: default_w2_nodes(),
            seed: None,
        }
    }
}

/// Output settings.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: String,
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
}

fn default_formats() -> Vec<String> {
    vec!["csv".into(), "json".into()]
}

/// The measure forms accepted in configs, keyed by their distinguishing
/// field. `atoms` may omit `smoothing_variance`; such a declaration can only
/// be used where atoms are legal (e.g. as a CLT-trace base).
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum MeasureForm {
    GaussianMixture {
        gaussian_mixture: Vec<(f64, f64, f64)>,
    },
    Atoms {
        atoms: Vec<(f64, f64)>,
        #[serde(default)]
        smoothing_variance: Option<f64>,
    },
    Uniform {
        uniform: (f64, f64),
    },
    Laplace {
        laplace: LaplaceParams,
    },
    Exponential {
        exponential: ExponentialParams,
    },
    Zoo {
        zoo: String,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaplaceParams {
    pub scale: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentialParams {
    pub rate: f64,
}

/// A named measure declaration.
#[derive(Debug, Clone, Deserialize)]
pub struct MeasureDecl {
    pub name: String,
    #[serde(flatten)]
    pub form: MeasureForm,
}

impl MeasureForm {
    /// Materialize onto a grid with the given numerics.
    pub fn to_grid(&self, numerics: &Numerics) -> Result<GridMeasure> {
        match self {
            MeasureForm::GaussianMixture { gaussian_mixture } => {
                let mix = GaussianMixtureSpec::new(gaussian_mixture.clone())?;
                materialize(
                    &MaterializeSpec::Mixture(mix),
                    numerics.window_sigmas,
                    numerics.n_grid,
                )
            }
            MeasureForm::Atoms {
                atoms,
                smoothing_variance,
            } => {
                let delta2 = smoothing_variance.ok_or_else(|| {
                    Error::Config(
                        "atoms need smoothing_variance to materialize onto a grid".into(),
                    )
                })?;
                let atoms = DiscreteAtoms::new(atoms.clone())?;
                materialize(
                    &MaterializeSpec::SmoothedAtoms { atoms, delta2 },
                    numerics.window_sigmas,
                    numerics.n_grid,
                )
            }
            MeasureForm::Uniform { uniform } => {
                GridMeasure::uniform(uniform.0, uniform.1, numerics.n_grid)
            }
            MeasureForm::Laplace { laplace } => GridMeasure::laplace(
                laplace.scale,
                zoo::EXP_TAIL_HALFWIDTH * laplace.scale,
                numerics.n_grid,
            ),
            MeasureForm::Exponential { exponential } => GridMeasure::exponential(
                exponential.rate,
                zoo::EXP_TAIL_HALFWIDTH / exponential.rate,
                numerics.n_grid,
            ),
            MeasureForm::Zoo { zoo: name } => {
                zoo::by_name(name).ok_or_else(|| Error::UnknownName(name.clone()))
            }
        }
    }

    /// Base for a CLT trace: atoms stay symbolic, everything else is a grid.
    pub fn to_clt_base(&self, numerics: &Numerics) -> Result<CltBase> {
        match self {
            MeasureForm::Atoms { atoms, .. } => {
                Ok(CltBase::Atoms(DiscreteAtoms::new(atoms.clone())?))
            }
            other => Ok(CltBase::Grid(other.to_grid(numerics)?)),
        }
    }
}

/// A task: a registered strategy name plus free-form parameters.
#[derive(Debug, Clone, Deserialize)]
pub struct TaskDecl {
    pub task: String,
    #[serde(flatten)]
    pub params: serde_json::Map<String, serde_json::Value>,
}

/// A whole experiment.
#[derive(Debug, Clone, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub measures: Vec<MeasureDecl>,
    #[serde(default)]
    pub tasks: Vec<TaskDecl>,
    #[serde(default)]
    pub numerics: Numerics,
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_json(body: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(body)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let body = std::fs::read_to_string(path)?;
        ExperimentConfig::from_json(&body)
    }

    pub fn find_measure(&self, name: &str) -> Result<&MeasureDecl> {
        self.measures
            .iter()
            .find(|m| m.name == name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    fn validate(&self) -> Result<()> {
        let mut names = std::collections::BTreeSet::new();
        for m in &self.measures {
            if !names.insert(m.name.clone()) {
                return Err(Error::Config(format!("duplicate measure name {}", m.name)));
            }
        }
        for t in &self.tasks {
            if let Some(serde_json::Value::String(name)) = t.params.get("measure") {
                self.find_measure(name)
                    .map_err(|_| Error::Config(format!(
                        "task `{}` references undeclared measure `{name}`",
                        t.task
                    )))?;
            }
            if let Some(serde_json::Value::Array(list)) = t.params.get("measures") {
                for v in list {
                    if let serde_json::Value::String(name) = v {
                        self.find_measure(name).map_err(|_| {
                            Error::Config(format!(
                                "task `{}` references undeclared measure `{name}`",
                                t.task
                            ))
                        })?;
                    }
                }
            }
            if t.task.starts_with("verify_") && self.numerics.seed.is_none() {
                return Err(Error::Config(format!(
                    "task `{}` is randomized; numerics.seed is required",
                    t.task
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_config() {
        let body = r#"{
            "measures": [
                {"name": "g", "gaussian_mixture": [[1.0, 0.0, 1.0]]},
                {"name": "b", "atoms": [[-0.5, 0.5], [0.5, 0.5]], "smoothing_variance": 0.25},
                {"name": "u", "uniform": [0.0, 1.0]},
                {"name": "l", "laplace": {"scale": 1.0}},
                {"name": "e", "exponential": {"rate": 2.0}}
            ],
            "tasks": [
                {"task": "estimate", "measure": "g"},
                {"task": "clt_trace", "measure": "b", "n_list": [1, 2], "delta2": 0.5}
            ],
            "numerics": {"n_grid": 1025, "seed": 7},
            "output": {"directory": "out", "formats": ["csv"]}
        }"#;
        let config = ExperimentConfig::from_json(body).unwrap();
        assert_eq!(config.measures.len(), 5);
        let g = config.find_measure("g").unwrap();
        let grid = g.form.to_grid(&config.numerics).unwrap();
        assert_eq!(grid.len(), 1025);
    }

    #[test]
    fn undeclared_measure_is_rejected() {
        let body = r#"{
            "measures": [],
            "tasks": [{"task": "estimate", "measure": "ghost"}],
            "output": {"directory": "out"}
        }"#;
        assert!(ExperimentConfig::from_json(body).is_err());
    }

    #[test]
    fn randomized_tasks_require_a_seed() {
        let body = r#"{
            "tasks": [{"task": "verify_shearer", "instances": 10}],
            "output": {"directory": "out"}
        }"#;
        assert!(ExperimentConfig::from_json(body).is_err());
    }

    #[test]
    fn atoms_without_smoothing_materialize_only_as_clt_base() {
        let body = r#"{
            "measures": [{"name": "b", "atoms": [[-1.0, 0.5], [1.0, 0.5]]}],
            "tasks": [],
            "output": {"directory": "out"}
        }"#;
        let config = ExperimentConfig::from_json(body).unwrap();
        let decl = config.find_measure("b").unwrap();
        assert!(decl.form.to_grid(&config.numerics).is_err());
        assert!(decl.form.to_clt_base(&config.numerics).is_ok());
    }
}
