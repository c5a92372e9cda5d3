use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bench::{DriftKind, DriftProfile, EnvironmentConfig};
use crate::meta_flh::Pruning;
use crate::OcoError;

/// Environment variable that replaces the configured seed when set.
pub const SEED_ENV: &str = "OCO_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// FLH over OGD on strongly convex quadratic streams.
    DynamicSc,
    /// FLH over ONS on exp-concave quadratic streams.
    DynamicEc,
    /// FLH over clipped KRR on drifting RKHS targets.
    DynamicKernel,
    /// A single clipped-KRR learner against the best penalized function in hindsight.
    PenalizedKrr,
    /// Bound values for the Gram matrix of a point set.
    BoundReport,
}

/// How labels are drawn in penalized-krr runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelMode {
    /// Independent uniform signs times `B`.
    #[default]
    Signs,
    /// Uniform on `[-B, B]`.
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default = "default_trace")]
    pub trace: String,
    #[serde(default = "default_metadata")]
    pub metadata: String,
    #[serde(default = "default_report")]
    pub report: String,
}

fn default_trace() -> String {
    "trace.csv".into()
}

fn default_metadata() -> String {
    "metadata.json".into()
}

fn default_report() -> String {
    "report.json".into()
}

impl Default for OutputPaths {
    fn default() -> Self {
        Self { trace: default_trace(), metadata: default_metadata(), report: default_report() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub seed: u64,
    #[serde(default = "default_dim")]
    pub d: usize,
    /// Curvature of quadratic losses.
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub curvature: Option<f64>,
    /// Radius of the Euclidean decision ball.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Gaussian kernel bandwidth.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// Label, clipping and RKHS-norm bound.
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    /// Ridge parameter.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    /// Regularization for the effective dimension; defaults to `a`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Overrides the learning rate derived from the curvature constants.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,
    /// Target path variation of the comparator sequence.
    #[serde(rename = "V_T", default, skip_serializing_if = "Option::is_none")]
    pub variation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drift: Option<DriftKind>,
    #[serde(default)]
    pub profile: DriftProfile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub switches: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pruning: Option<Pruning>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchors: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_range: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<f64>,
    #[serde(default)]
    pub labels: LabelMode,
    /// Explicit inputs for bound-report; random inputs are drawn otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub output: OutputPaths,
}

fn default_dim() -> usize {
    1
}

/// A rejected configuration, with the 1-based line it refers to.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ConfigError {}

impl ConfigError {
    pub(crate) fn from_json(err: &serde_json::Error) -> Self {
        Self { line: err.line().max(1), message: err.to_string() }
    }

    /// Locate `key` in the source text, falling back to the first line.
    pub(crate) fn at_key(source: &str, key: &str, message: impl Into<String>) -> Self {
        let needle = format!("\"{key}\"");
        let line = source.lines().position(|l| l.contains(&needle)).map_or(1, |i| i + 1);
        Self { line, message: message.into() }
    }
}

/// A validation failure: the offending key and a message.
pub type FieldError = (&'static str, String);

fn positive(value: Option<f64>, key: &'static str) -> Result<(), FieldError> {
    match value {
        Some(v) if !(v > 0.0) || !v.is_finite() => Err((key, format!("{key} must be positive and finite, got {v}"))),
        _ => Ok(()),
    }
}

impl ExperimentConfig {
    /// Parse and validate, applying the seed override from the environment.
    pub fn from_json_str(source: &str) -> Result<Self, ConfigError> {
        let mut cfg: Self = serde_json::from_str(source).map_err(|e| ConfigError::from_json(&e))?;
        if let Ok(seed) = std::env::var(SEED_ENV) {
            cfg.seed = seed
                .trim()
                .parse()
                .map_err(|_| ConfigError::at_key(source, "seed", format!("{SEED_ENV}={seed:?} is not a valid seed")))?;
        }
        cfg.validate().map_err(|(key, msg)| ConfigError::at_key(source, key, msg))?;
        Ok(cfg)
    }

    /// Checks every constraint a run relies on. Errors name the offending key.
    pub fn validate(&self) -> Result<(), FieldError> {
        if self.horizon == 0 {
            return Err(("T", "T must be at least 1".into()));
        }
        if self.d == 0 {
            return Err(("d", "d must be at least 1".into()));
        }
        positive(self.curvature, "H")?;
        positive(self.radius, "radius")?;
        positive(self.sigma, "sigma")?;
        positive(self.bound, "B")?;
        positive(self.a, "a")?;
        positive(self.lambda, "lambda")?;
        positive(self.zeta, "zeta")?;
        positive(self.input_range, "input_range")?;
        if let Some(n) = self.noise {
            if !(n >= 0.0) || !n.is_finite() {
                return Err(("noise", format!("noise must be nonnegative, got {n}")));
            }
        }
        match self.kind {
            ExperimentKind::DynamicSc | ExperimentKind::DynamicEc => {
                if self.curvature.is_none() {
                    return Err(("kind", "missing field `H`".into()));
                }
                if self.variation.is_none() {
                    return Err(("kind", "missing field `V_T`".into()));
                }
                if self.drift == Some(DriftKind::KernelRegression) {
                    return Err(("drift", "quadratic experiments need piecewise-constant or random-walk drift".into()));
                }
            }
            ExperimentKind::DynamicKernel => {
                if self.variation.is_none() {
                    return Err(("kind", "missing field `V_T`".into()));
                }
                if self.drift.is_some_and(|d| d != DriftKind::KernelRegression) {
                    return Err(("drift", "kernel experiments use kernel-regression drift".into()));
                }
            }
            ExperimentKind::PenalizedKrr => {}
            ExperimentKind::BoundReport => {
                if let Some(points) = &self.points {
                    if points.len() != self.horizon {
                        return Err(("points", format!("{} points given but T = {}", points.len(), self.horizon)));
                    }
                    if let Some(p) = points.iter().find(|p| p.len() != self.d || p.iter().any(|v| !v.is_finite())) {
                        return Err(("points", format!("every point needs {} finite coordinates, found {p:?}", self.d)));
                    }
                }
            }
        }
        if let Some(env) = self.environment() {
            env.validate().map_err(|e| match e {
                OcoError::Config(msg) => ("V_T", msg),
                other => ("kind", other.to_string()),
            })?;
        }
        Ok(())
    }

    pub fn sigma(&self) -> f64 {
        self.sigma.unwrap_or(1.0)
    }

    pub fn bound(&self) -> f64 {
        self.bound.unwrap_or(1.0)
    }

    pub fn ridge(&self) -> f64 {
        self.a.unwrap_or(1.0)
    }

    pub fn radius(&self) -> f64 {
        self.radius.unwrap_or(1.0)
    }

    pub fn input_range(&self) -> f64 {
        self.input_range.unwrap_or(2.0)
    }

    /// Pool pruning; kernel runs prune by default since their experts are costly.
    pub fn pruning(&self) -> Pruning {
        self.pruning.unwrap_or(match self.kind {
            ExperimentKind::DynamicKernel => Pruning::Aflh,
            _ => Pruning::None,
        })
    }

    /// The loss-stream generator for the dynamic kinds.
    pub fn environment(&self) -> Option<EnvironmentConfig> {
        let variation = self.variation.unwrap_or(0.0);
        let mut env = match self.kind {
            ExperimentKind::DynamicSc | ExperimentKind::DynamicEc => {
                let kind = self.drift.unwrap_or(DriftKind::RandomWalk);
                let mut env = EnvironmentConfig::quadratic(kind, self.horizon, self.d, variation, self.seed);
                env.curvature = self.curvature.unwrap_or(1.0);
                env.radius = self.radius();
                env.switches = self.switches;
                env
            }
            ExperimentKind::DynamicKernel => {
                let mut env = EnvironmentConfig::kernel(self.horizon, self.d, variation, self.seed);
                env.bandwidth = self.sigma();
                env.bound = self.bound();
                env.input_range = self.input_range();
                if let Some(n) = self.anchors {
                    env.anchors = n;
                }
                env.noise = self.noise.unwrap_or(0.0);
                env
            }
            _ => return None,
        };
        env.profile = self.profile;
        Some(env)
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}
