use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ConfigError, ExperimentConfig, SEED_ENV};
use super::run::{run_experiment, write_outcome};
use crate::{OcoError, Result};

/// Horizons to sweep and how each point's variation target is derived.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    #[serde(rename = "T")]
    pub horizons: Vec<usize>,
    /// Explicit targets, one per horizon.
    #[serde(rename = "V_T", default, skip_serializing_if = "Option::is_none")]
    pub variations: Option<Vec<f64>>,
    /// Otherwise `V_T = scale * T^exponent`.
    #[serde(default = "default_scale")]
    pub variation_scale: f64,
    #[serde(default = "default_exponent")]
    pub variation_exponent: f64,
}

fn default_scale() -> f64 {
    1.0
}

fn default_exponent() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub base: ExperimentConfig,
    pub grid: SweepGrid,
    /// Report `regret = sqrt(T V_T)` without running anything.
    #[serde(default)]
    pub synthetic: bool,
    #[serde(default = "default_summary")]
    pub summary: String,
}

fn default_summary() -> String {
    "summary.csv".into()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "T")]
    pub horizon: usize,
    #[serde(rename = "V_T")]
    pub variation: f64,
    pub regret: f64,
    #[serde(rename = "sqrt_TV")]
    pub sqrt_tv: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of `ln regret` against `ln sqrt(T V_T)`; NaN with fewer than two usable points.
    pub slope: f64,
}

impl SweepConfig {
    pub fn from_json_str(source: &str) -> std::result::Result<Self, ConfigError> {
        let mut cfg: Self = serde_json::from_str(source).map_err(|e| ConfigError::from_json(&e))?;
        if let Ok(seed) = std::env::var(SEED_ENV) {
            cfg.base.seed = seed
                .trim()
                .parse()
                .map_err(|_| ConfigError::at_key(source, "seed", format!("{SEED_ENV}={seed:?} is not a valid seed")))?;
        }
        if cfg.grid.horizons.is_empty() {
            return Err(ConfigError::at_key(source, "grid", "grid needs at least one horizon"));
        }
        if let Some(v) = &cfg.grid.variations {
            if v.len() != cfg.grid.horizons.len() {
                return Err(ConfigError::at_key(
                    source,
                    "V_T",
                    format!("{} variation targets for {} horizons", v.len(), cfg.grid.horizons.len()),
                ));
            }
        }
        if !(cfg.grid.variation_scale >= 0.0) || !cfg.grid.variation_exponent.is_finite() {
            return Err(ConfigError::at_key(source, "variation_scale", "variation scale must be nonnegative"));
        }
        for point in cfg.points() {
            point.validate().map_err(|(key, msg)| {
                ConfigError::at_key(source, key, format!("grid point T = {}: {msg}", point.horizon))
            })?;
        }
        Ok(cfg)
    }

    /// One experiment configuration per horizon.
    pub fn points(&self) -> Vec<ExperimentConfig> {
        self.grid
            .horizons
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let variation = match &self.grid.variations {
                    Some(v) => v[i],
                    None => self.grid.variation_scale * (t as f64).powf(self.grid.variation_exponent),
                };
                let mut point = self.base.clone();
                point.horizon = t;
                point.variation = Some(variation);
                point
            })
            .collect()
    }
}

/// Least-squares slope of `ln y` against `ln x` over points with both positive.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> =
        xs.iter().zip(ys).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return f64::NAN;
    }
    pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx
}

fn row(horizon: usize, variation: f64, regret: f64) -> SweepRow {
    let sqrt_tv = (horizon as f64 * variation).sqrt();
    SweepRow { horizon, variation, regret, sqrt_tv, ratio: regret / sqrt_tv }
}

fn run_point(index: usize, point: &ExperimentConfig, synthetic: bool, out_dir: Option<&Path>) -> Result<SweepRow> {
    let target = point.variation.unwrap_or(0.0);
    if synthetic {
        return Ok(row(point.horizon, target, (point.horizon as f64 * target).sqrt()));
    }
    let outcome = run_experiment(point)?;
    if let Some(dir) = out_dir {
        write_outcome(&outcome, point, &dir.join(format!("point-{index:03}-T{}", point.horizon)))?;
    }
    let variation = outcome.metadata.path_variation.unwrap_or(target);
    Ok(row(point.horizon, variation, outcome.metadata.dynamic_regret))
}

/// Run every grid point on a pool of `threads` workers. Rows keep grid order.
pub fn run_sweep(cfg: &SweepConfig, threads: usize, out_dir: Option<&Path>) -> Result<SweepSummary> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| OcoError::Config(format!("thread pool: {e}")))?;
    let points = cfg.points();
    let rows = pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(i, p)| run_point(i, p, cfg.synthetic, out_dir))
            .collect::<Result<Vec<_>>>()
    })?;
    let xs: Vec<f64> = rows.iter().map(|r| r.sqrt_tv).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.regret).collect();
    Ok(SweepSummary { slope: loglog_slope(&xs, &ys), rows })
}

/// Summary CSV plus a JSON file with the same stem holding rows and slope.
pub fn write_summary(summary: &SweepSummary, csv_path: &Path) -> Result<()> {
    if let Some(parent) = csv_path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut out = BufWriter::new(fs::File::create(csv_path)?);
    writeln!(out, "T,V_T,regret,sqrt_TV,ratio")?;
    for r in &summary.rows {
        writeln!(out, "{},{:.16e},{:.16e},{:.16e},{:.16e}", r.horizon, r.variation, r.regret, r.sqrt_tv, r.ratio)?;
    }
    out.flush()?;
    let json = serde_json::json!({
        "rows": summary.rows,
        "slope": if summary.slope.is_finite() { serde_json::json!(summary.slope) } else { serde_json::json!("NaN") },
    });
    let text = serde_json::to_string_pretty(&json).map_err(|e| OcoError::Io(e.to_string()))?;
    fs::write(csv_path.with_extension("json"), text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sweep(grid: &str, synthetic: bool) -> SweepConfig {
        let src = format!(
            r#"{{"base": {{"kind": "dynamic-sc", "T": 1, "seed": 3, "H": 1, "radius": 1}}, "grid": {grid}, "synthetic": {synthetic}}}"#
        );
        SweepConfig::from_json_str(&src).unwrap()
    }

    #[test]
    fn single_point_has_undefined_slope() {
        let s = run_sweep(&sweep(r#"{"T": [100]}"#, false), 1, None).unwrap();
        assert_eq!(s.rows.len(), 1);
        assert!(s.slope.is_nan());
    }

    #[test]
    fn synthetic_grid_has_unit_slope() {
        let s = run_sweep(&sweep(r#"{"T": [100, 400, 1600]}"#, true), 2, None).unwrap();
        assert!((s.slope - 1.0).abs() <= 1e-6, "{}", s.slope);
    }

    #[test]
    fn parallel_matches_serial() {
        let cfg = sweep(r#"{"T": [50, 100, 200], "variation_scale": 0.5}"#, false);
        let a = run_sweep(&cfg, 1, None).unwrap();
        let b = run_sweep(&cfg, 3, None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mismatched_variations_rejected() {
        let src = "{\"base\": {\"kind\": \"dynamic-sc\", \"T\": 1, \"seed\": 3, \"H\": 1},\n \"grid\": {\"T\": [10, 20],\n \"V_T\": [1]}}";
        assert_eq!(SweepConfig::from_json_str(src).unwrap_err().line, 3);
    }

    #[test]
    fn summary_files_written() {
        let dir = tempfile::tempdir().unwrap();
        let s = run_sweep(&sweep(r#"{"T": [10]}"#, true), 1, None).unwrap();
        let path = dir.path().join("summary.csv");
        write_summary(&s, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("T,V_T,regret,sqrt_TV,ratio\n"));
        assert!(fs::read_to_string(path.with_extension("json")).unwrap().contains("NaN"));
    }
}
