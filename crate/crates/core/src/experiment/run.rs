use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{ExperimentConfig, ExperimentKind, LabelMode};
use crate::base_learners::{KrrLearner, LearnerSpec};
use crate::bench::{dynamic_regret, generate_environment, penalized_regret, Environment, RegretTrace, TraceMetadata};
use crate::kernel_core::{gram_matrix, krr_fit, PenalizedBoundReport};
use crate::meta_flh::{Flh, Pruning, RoundRecord};
use crate::{OcoError, Result, Vector};

/// Everything a single run produces.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub trace: RegretTrace,
    pub metadata: TraceMetadata,
    pub report: Option<PenalizedBoundReport>,
}

/// Run FLH over `spec` learners on a generated environment. `observe` sees
/// every round record before the pool is updated.
pub fn run_flh(
    env: &Environment,
    spec: LearnerSpec,
    zeta: f64,
    pruning: Pruning,
    mut observe: impl FnMut(&RoundRecord),
) -> Result<RegretTrace> {
    let mut flh = Flh::from_spec(spec, zeta, pruning)?;
    let mut trace = RegretTrace::new();
    for (loss, &comparator_loss) in env.losses.iter().zip(&env.comparator_losses) {
        let record = flh.round(loss)?;
        if let (Some(x), Some(y)) = (loss.covariate(), loss.label()) {
            trace.push_regression(x, y, record.prediction[0]);
        }
        trace.push(record.loss, comparator_loss);
        observe(&record);
    }
    Ok(trace)
}

fn algorithm_name(pruning: Pruning, spec: &LearnerSpec) -> String {
    let meta = match pruning {
        Pruning::None => "flh",
        Pruning::Aflh => "aflh",
    };
    format!("{meta}+{}", spec.name())
}

fn random_points(rng: &mut ChaCha8Rng, count: usize, dim: usize, range: f64) -> Vec<Vector> {
    (0..count).map(|_| Vector::from_fn(dim, |_, _| rng.random_range(-range..=range))).collect()
}

fn now_secs() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn dynamic(cfg: &ExperimentConfig) -> Result<(RegretTrace, String, Option<f64>)> {
    let env_cfg = cfg.environment().expect("dynamic kinds have an environment");
    let env = generate_environment(&env_cfg)?;
    let cert = env_cfg.certificate();
    let spec = match cfg.kind {
        ExperimentKind::DynamicSc => {
            LearnerSpec::Ogd { dim: cfg.d, curvature: env_cfg.curvature, radius: env_cfg.radius }
        }
        ExperimentKind::DynamicEc => LearnerSpec::ons_from_certificate(cfg.d, &cert)?,
        _ => LearnerSpec::Krr { ridge: cfg.ridge(), bound: cfg.bound(), bandwidth: cfg.sigma() },
    };
    let zeta = cfg.zeta.unwrap_or(cert.exp_concavity);
    let pruning = cfg.pruning();
    let trace = run_flh(&env, spec, zeta, pruning, |_| {})?;
    Ok((trace, algorithm_name(pruning, &spec), Some(env.comparators.variation())))
}

fn penalized_krr(cfg: &ExperimentConfig) -> Result<(RegretTrace, PenalizedBoundReport, f64)> {
    let (a, b, sigma) = (cfg.ridge(), cfg.bound(), cfg.sigma());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let points = random_points(&mut rng, cfg.horizon, cfg.d, cfg.input_range());
    let labels: Vec<f64> = (0..cfg.horizon)
        .map(|_| match cfg.labels {
            LabelMode::Signs => {
                if rng.random::<bool>() {
                    b
                } else {
                    -b
                }
            }
            LabelMode::Uniform => rng.random_range(-b..=b),
        })
        .collect();

    let k = gram_matrix(&points, sigma)?;
    let y = Vector::from_column_slice(&labels);
    let fitted = &k * krr_fit(&k, &y, a)?;

    let mut learner = KrrLearner::new(a, b, sigma)?;
    let mut trace = RegretTrace::new();
    for (t, (x, &label)) in points.iter().zip(&labels).enumerate() {
        let prediction = learner.predict(x);
        trace.push_regression(x, label, prediction);
        trace.push((prediction - label).powi(2), (fitted[t] - label).powi(2));
        learner.update(x.clone(), label)?;
    }
    let regret = penalized_regret(&trace, &k, a)?;
    let report = PenalizedBoundReport::compute(&k, a, b, cfg.lambda.unwrap_or(a))?;
    Ok((trace, report, regret))
}

fn bound_report(cfg: &ExperimentConfig) -> Result<PenalizedBoundReport> {
    let points = match &cfg.points {
        Some(p) => p.iter().map(|p| Vector::from_column_slice(p)).collect(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            random_points(&mut rng, cfg.horizon, cfg.d, cfg.input_range())
        }
    };
    let k = gram_matrix(&points, cfg.sigma())?;
    let a = cfg.ridge();
    PenalizedBoundReport::compute(&k, a, cfg.bound(), cfg.lambda.unwrap_or(a))
}

/// Execute a validated configuration.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let (trace, algorithm, path_variation, report, penalized) = match cfg.kind {
        ExperimentKind::DynamicSc | ExperimentKind::DynamicEc | ExperimentKind::DynamicKernel => {
            let (trace, algorithm, variation) = dynamic(cfg)?;
            (trace, algorithm, variation, None, None)
        }
        ExperimentKind::PenalizedKrr => {
            let (trace, report, regret) = penalized_krr(cfg)?;
            (trace, "krr".to_string(), None, Some(report), Some(regret))
        }
        ExperimentKind::BoundReport => {
            (RegretTrace::new(), "bound-report".to_string(), None, Some(bound_report(cfg)?), None)
        }
    };
    let metadata = TraceMetadata {
        algorithm,
        seed: cfg.seed,
        config_hash: cfg.hash(),
        horizon: cfg.horizon,
        path_variation,
        dynamic_regret: dynamic_regret(&trace),
        penalized_regret: penalized,
        created_unix_secs: now_secs(),
    };
    Ok(ExperimentOutcome { trace, metadata, report })
}

fn resolve(dir: &Path, name: &str) -> PathBuf {
    let p = Path::new(name);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        dir.join(p)
    }
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = fs::File::create(path)?;
    serde_json::to_writer_pretty(BufWriter::new(file), value).map_err(|e| OcoError::Io(e.to_string()))
}

/// Write trace, metadata and (when present) report; returns the paths written.
pub fn write_outcome(outcome: &ExperimentOutcome, cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let trace_path = resolve(dir, &cfg.output.trace);
    outcome.trace.write_csv(BufWriter::new(fs::File::create(&trace_path)?))?;
    let metadata_path = resolve(dir, &cfg.output.metadata);
    write_json(&metadata_path, &outcome.metadata)?;
    let mut written = vec![trace_path, metadata_path];
    if let Some(report) = &outcome.report {
        let report_path = resolve(dir, &cfg.output.report);
        write_json(&report_path, report)?;
        written.push(report_path);
    }
    Ok(written)
}
