//! Versioned JSON experiment configuration. Unknown keys are rejected so
//! sweep typos fail loudly instead of running the wrong experiment.

use serde::{Deserialize, Serialize};

use deposim::sampling::SphereMode;
use deposim::shape::{ShapeFunction, ShapeKind};
use deposim::torus::TorusPoint;
use deposim::{ModelKind, ModelParams};

pub const CONFIG_VERSION: u32 = 1;
pub const DEFAULT_N_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub alpha: f64,
    pub beta: f64,
    /// Torus side length D.
    pub domain: f64,
    pub dim: usize,
    pub shape: ShapeName,
    pub model: ModelName,
    pub grid_per_dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeName {
    Triangle,
    CubicHump,
    Parabola,
    IndicatorStep,
}

impl From<ShapeName> for ShapeKind {
    fn from(s: ShapeName) -> ShapeKind {
        match s {
            ShapeName::Triangle => ShapeKind::Triangle,
            ShapeName::CubicHump => ShapeKind::CubicHump,
            ShapeName::Parabola => ShapeKind::Parabola,
            ShapeName::IndicatorStep => ShapeKind::IndicatorStep,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelName {
    Rand,
    Min,
    Stellar,
}

impl From<ModelName> for ModelKind {
    fn from(m: ModelName) -> ModelKind {
        match m {
            ModelName::Rand => ModelKind::Rand,
            ModelName::Min => ModelKind::Min,
            ModelName::Stellar => ModelKind::Stellar,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaModeName {
    #[default]
    UniformSphere,
    UpperHemisphere,
}

impl From<ThetaModeName> for SphereMode {
    fn from(m: ThetaModeName) -> SphereMode {
        match m {
            ThetaModeName::UniformSphere => SphereMode::UniformSphere,
            ThetaModeName::UpperHemisphere => SphereMode::UpperHemisphere,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub name: String,
    pub params: ParamsConfig,
    pub replicas: u64,
    pub checkpoint_ns: Vec<u64>,
    /// Probe points, one coordinate array per probe.
    pub probes: Vec<Vec<f64>>,
    pub master_seed: u64,
    /// Output directory.
    pub outputs: String,
    #[serde(default)]
    pub suite: Option<String>,
    #[serde(default)]
    pub theta_mode: ThetaModeName,
    /// Hard cap on deposits per trajectory.
    #[serde(default)]
    pub n_budget: Option<u64>,
    /// Deposition-log entries retained per replica (0 disables logging).
    #[serde(default)]
    pub log_cap: usize,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| ConfigError(format!("config parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.version != CONFIG_VERSION {
            return Err(ConfigError(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        if self.replicas < 1 {
            return Err(ConfigError("replicas must be >= 1".into()));
        }
        for w in self.checkpoint_ns.windows(2) {
            if w[1] <= w[0] {
                return Err(ConfigError(
                    "checkpoint_ns must be strictly increasing".into(),
                ));
            }
        }
        if let (Some(&max), Some(budget)) = (self.checkpoint_ns.last(), self.n_budget) {
            if max > budget {
                return Err(ConfigError(format!(
                    "checkpoint N {max} exceeds n_budget {budget}"
                )));
            }
        }
        for (i, p) in self.probes.iter().enumerate() {
            if p.len() != self.params.dim {
                return Err(ConfigError(format!(
                    "probe {i} has {} coordinates for dimension {}",
                    p.len(),
                    self.params.dim
                )));
            }
            for &c in p {
                if !(0.0..=self.params.domain).contains(&c) {
                    return Err(ConfigError(format!(
                        "probe {i} coordinate {c} outside [0, {}]",
                        self.params.domain
                    )));
                }
            }
        }
        // model constraints surface early with a readable message
        self.model_params()
            .map_err(|e| ConfigError(format!("params: {e}")))?;
        Ok(())
    }

    pub fn model_params(&self) -> deposim::Result<ModelParams> {
        ModelParams::new(
            self.params.alpha,
            self.params.beta,
            self.params.domain,
            self.params.dim,
            ShapeFunction::new(self.params.shape.into()),
            self.params.model.into(),
            self.params.grid_per_dim,
        )
    }

    pub fn probe_points(&self) -> Vec<TorusPoint> {
        self.probes
            .iter()
            .map(|c| TorusPoint::new(c, self.params.domain))
            .collect()
    }

    pub fn budget(&self) -> u64 {
        self.n_budget.unwrap_or(DEFAULT_N_BUDGET)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_json() -> serde_json::Value {
        serde_json::json!({
            "version": 1,
            "name": "demo",
            "params": {
                "alpha": 1.5, "beta": 2.0, "domain": 60.0, "dim": 1,
                "shape": "triangle", "model": "rand", "grid_per_dim": 128
            },
            "replicas": 2,
            "checkpoint_ns": [10, 100],
            "probes": [[15.0]],
            "master_seed": 7,
            "outputs": "out"
        })
    }

    #[test]
    fn roundtrip() {
        let cfg = ExperimentConfig::from_json(&base_json().to_string()).unwrap();
        assert_eq!(cfg.name, "demo");
        let again: ExperimentConfig =
            serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(again.params.alpha, 1.5);
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut v = base_json();
        v["alpa"] = serde_json::json!(2.0);
        assert!(ExperimentConfig::from_json(&v.to_string()).is_err());

        let mut v = base_json();
        v["params"]["alhpa"] = serde_json::json!(2.0);
        assert!(ExperimentConfig::from_json(&v.to_string()).is_err());
    }

    #[test]
    fn validation_catches_bad_schedules_and_probes() {
        let mut v = base_json();
        v["checkpoint_ns"] = serde_json::json!([100, 100]);
        assert!(ExperimentConfig::from_json(&v.to_string()).is_err());

        let mut v = base_json();
        v["probes"] = serde_json::json!([[61.0]]);
        assert!(ExperimentConfig::from_json(&v.to_string()).is_err());

        let mut v = base_json();
        v["probes"] = serde_json::json!([[1.0, 2.0]]);
        assert!(ExperimentConfig::from_json(&v.to_string()).is_err());
    }

    #[test]
    fn stellar_dimension_enforced() {
        let mut v = base_json();
        v["params"]["model"] = serde_json::json!("stellar");
        assert!(ExperimentConfig::from_json(&v.to_string()).is_err());
    }
}
