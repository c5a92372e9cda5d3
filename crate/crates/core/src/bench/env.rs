use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::variation::ComparatorSequence;
use crate::kernel_core::{KernelBasis, RkhsFunction};
use crate::losses::{CurvatureCertificate, LossFunction};
use crate::{OcoError, Result, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriftKind {
    /// Quadratic losses whose centers jump at evenly spaced switch rounds.
    PiecewiseConstant,
    /// Quadratic losses whose centers move every round.
    RandomWalk,
    /// Squared-error regression against a target function rotating in the RKHS.
    KernelRegression,
}

/// How the total drift is spread over rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriftProfile {
    /// Equal movement every round.
    #[default]
    Uniform,
    /// Movement at round `t` proportional to `1/sqrt(t)`.
    Decaying,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentConfig {
    pub kind: DriftKind,
    pub horizon: usize,
    pub dim: usize,
    /// Target path variation of the comparator sequence.
    pub variation: f64,
    pub seed: u64,
    #[serde(default)]
    pub profile: DriftProfile,
    /// Curvature of the quadratic losses.
    #[serde(default = "default_one")]
    pub curvature: f64,
    /// Radius of the Euclidean decision ball.
    #[serde(default = "default_one")]
    pub radius: f64,
    /// Number of jumps for piecewise-constant drift.
    #[serde(default)]
    pub switches: Option<usize>,
    #[serde(default = "default_one")]
    pub bandwidth: f64,
    /// Shared bound on labels and on the RKHS norm of the target.
    #[serde(default = "default_one")]
    pub bound: f64,
    #[serde(default = "default_anchors")]
    pub anchors: usize,
    /// Covariates are drawn uniformly from `[-range, range]^d`.
    #[serde(default = "default_input_range")]
    pub input_range: f64,
    /// Standard deviation of Gaussian label noise (labels are clipped to `[-B, B]`).
    #[serde(default)]
    pub noise: f64,
}

fn default_one() -> f64 {
    1.0
}

fn default_anchors() -> usize {
    16
}

fn default_input_range() -> f64 {
    2.0
}

/// Fraction of the label bound used as the RKHS norm of the drifting target.
const TARGET_NORM_FRACTION: f64 = 0.9;

impl EnvironmentConfig {
    pub fn quadratic(kind: DriftKind, horizon: usize, dim: usize, variation: f64, seed: u64) -> Self {
        Self {
            kind,
            horizon,
            dim,
            variation,
            seed,
            profile: DriftProfile::Uniform,
            curvature: 1.0,
            radius: 1.0,
            switches: None,
            bandwidth: 1.0,
            bound: 1.0,
            anchors: default_anchors(),
            input_range: default_input_range(),
            noise: 0.0,
        }
    }

    pub fn kernel(horizon: usize, dim: usize, variation: f64, seed: u64) -> Self {
        Self::quadratic(DriftKind::KernelRegression, horizon, dim, variation, seed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(OcoError::config("horizon must be at least 1"));
        }
        if self.dim == 0 {
            return Err(OcoError::config("dimension must be at least 1"));
        }
        if !(self.variation >= 0.0) || !self.variation.is_finite() {
            return Err(OcoError::config(format!("variation target must be finite and nonnegative, got {}", self.variation)));
        }
        if self.horizon == 1 && self.variation > 0.0 {
            return Err(OcoError::config("a single round cannot realize positive variation"));
        }
        match self.kind {
            DriftKind::PiecewiseConstant | DriftKind::RandomWalk => {
                if !(self.curvature > 0.0) {
                    return Err(OcoError::config(format!("curvature must be positive, got {}", self.curvature)));
                }
                if !(self.radius > 0.0) {
                    return Err(OcoError::config(format!("radius must be positive, got {}", self.radius)));
                }
                let diameter = 2.0 * self.radius;
                if self.variation > diameter * self.horizon as f64 {
                    return Err(OcoError::config(format!(
                        "variation {} unachievable: exceeds diameter times horizon {}",
                        self.variation,
                        diameter * self.horizon as f64
                    )));
                }
                if self.kind == DriftKind::RandomWalk {
                    self.check_step_sizes(self.radius, "the radius")?;
                } else {
                    let switches = self.switch_count();
                    if self.variation > 0.0 && (switches == 0 || switches > self.horizon - 1) {
                        return Err(OcoError::config(format!(
                            "piecewise drift needs between 1 and {} switches, got {switches}",
                            self.horizon - 1
                        )));
                    }
                    let jump = self.jump_size();
                    if jump > self.radius {
                        return Err(OcoError::config(format!(
                            "variation {} unachievable with {switches} switches: jump {jump} exceeds the radius {}",
                            self.variation, self.radius
                        )));
                    }
                }
            }
            DriftKind::KernelRegression => {
                if !(self.bandwidth > 0.0) || !(self.bound > 0.0) || !(self.input_range > 0.0) {
                    return Err(OcoError::config("bandwidth, bound and input range must be positive"));
                }
                if self.anchors < 2 {
                    return Err(OcoError::config("kernel drift needs at least two anchors"));
                }
                if !(self.noise >= 0.0) {
                    return Err(OcoError::config("noise must be nonnegative"));
                }
                self.check_step_sizes(2.0 * TARGET_NORM_FRACTION * self.bound, "the target diameter")?;
            }
        }
        Ok(())
    }

    fn check_step_sizes(&self, limit: f64, what: &str) -> Result<()> {
        let steps = step_sizes(self.horizon, self.variation, self.profile);
        if let Some(max) = steps.iter().copied().reduce(f64::max) {
            if max > limit {
                return Err(OcoError::config(format!(
                    "variation {} unachievable: per-round move {max} exceeds {what} {limit}",
                    self.variation
                )));
            }
        }
        Ok(())
    }

    fn switch_count(&self) -> usize {
        if self.variation == 0.0 {
            0
        } else {
            self.switches
                .unwrap_or_else(|| (self.variation / (0.5 * self.radius)).ceil().max(1.0) as usize)
        }
    }

    fn jump_size(&self) -> f64 {
        match self.switch_count() {
            0 => 0.0,
            m => self.variation / m as f64,
        }
    }

    /// Uniform curvature constants for every loss the environment can emit.
    pub fn certificate(&self) -> CurvatureCertificate {
        match self.kind {
            DriftKind::PiecewiseConstant | DriftKind::RandomWalk => {
                let g = 2.0 * self.curvature * self.radius;
                CurvatureCertificate {
                    strong_convexity: self.curvature,
                    exp_concavity: self.curvature / (g * g),
                    gradient_bound: g,
                    diameter: 2.0 * self.radius,
                }
            }
            DriftKind::KernelRegression => CurvatureCertificate {
                strong_convexity: 0.0,
                exp_concavity: 1.0 / (8.0 * self.bound * self.bound),
                gradient_bound: 2.0 * self.bound * self.bound,
                diameter: 2.0 * self.bound,
            },
        }
    }
}

/// A loss stream together with the comparator sequence it is measured against.
#[derive(Debug, Clone)]
pub struct Environment {
    pub losses: Vec<LossFunction>,
    pub comparators: ComparatorSequence,
    /// `f_t(z_t)` for every round.
    pub comparator_losses: Vec<f64>,
}

/// Movement per round for `t = 2..=T`, summing to `total`.
fn step_sizes(horizon: usize, total: f64, profile: DriftProfile) -> Vec<f64> {
    if horizon < 2 {
        return Vec::new();
    }
    let weights: Vec<f64> = match profile {
        DriftProfile::Uniform => vec![1.0; horizon - 1],
        DriftProfile::Decaying => (2..=horizon).map(|t| 1.0 / (t as f64).sqrt()).collect(),
    };
    let sum: f64 = weights.iter().sum();
    weights.into_iter().map(|w| total * w / sum).collect()
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vector {
    loop {
        let v = Vector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

/// Move `c` by exactly `delta` in a random direction while staying in the
/// ball. Requires `delta <= radius`.
fn drift_step(rng: &mut ChaCha8Rng, c: &Vector, delta: f64, radius: f64) -> Vector {
    let mut u = random_unit(rng, c.len());
    let candidate = c + &u * delta;
    if candidate.norm() <= radius {
        return candidate;
    }
    let cn = c.norm();
    if cn > 0.0 {
        let chat = c / cn;
        let along = u.dot(&chat);
        if along > 0.0 {
            u -= chat.clone() * (2.0 * along);
            let reflected = c + &u * delta;
            if reflected.norm() <= radius {
                return reflected;
            }
        }
        return c - chat * delta;
    }
    candidate
}

fn initial_center(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> Vector {
    let r = 0.5 * radius * rng.random::<f64>().powf(1.0 / dim as f64);
    random_unit(rng, dim) * r
}

fn quadratic_environment(cfg: &EnvironmentConfig, rng: &mut ChaCha8Rng) -> Result<Environment> {
    let mut centers = Vec::with_capacity(cfg.horizon);
    let mut c = initial_center(rng, cfg.dim, cfg.radius);
    centers.push(c.clone());
    match cfg.kind {
        DriftKind::RandomWalk => {
            let steps = step_sizes(cfg.horizon, cfg.variation, cfg.profile);
            for delta in steps {
                c = drift_step(rng, &c, delta, cfg.radius);
                centers.push(c.clone());
            }
        }
        DriftKind::PiecewiseConstant => {
            let switches = cfg.switch_count();
            let jump = cfg.jump_size();
            let switch_rounds: Vec<usize> =
                (0..switches).map(|k| 2 + k * (cfg.horizon - 1) / switches).collect();
            let mut next = 0;
            for t in 2..=cfg.horizon {
                if next < switch_rounds.len() && switch_rounds[next] == t {
                    c = drift_step(rng, &c, jump, cfg.radius);
                    next += 1;
                }
                centers.push(c.clone());
            }
        }
        DriftKind::KernelRegression => unreachable!("handled by kernel_environment"),
    }
    let losses = centers
        .iter()
        .map(|c| LossFunction::quadratic(c.clone(), cfg.curvature, cfg.radius))
        .collect::<Result<Vec<_>>>()?;
    let comparator_losses = vec![0.0; cfg.horizon];
    Ok(Environment { losses, comparators: ComparatorSequence::from_points(centers)?, comparator_losses })
}

fn kernel_environment(cfg: &EnvironmentConfig, rng: &mut ChaCha8Rng) -> Result<Environment> {
    let range = cfg.input_range;
    let sample_input = |rng: &mut ChaCha8Rng| Vector::from_fn(cfg.dim, |_, _| rng.random_range(-range..=range));
    let anchors: Vec<Vector> = (0..cfg.anchors).map(|_| sample_input(rng)).collect();
    let basis = Arc::new(KernelBasis::new(anchors, cfg.bandwidth)?);

    // Two directions orthonormal in the RKHS inner product.
    let raw = |rng: &mut ChaCha8Rng| Vector::from_fn(cfg.anchors, |_, _| rng.sample::<f64, _>(StandardNormal));
    let g1 = raw(rng);
    let u = &g1 / basis.inner(&g1, &g1).sqrt();
    let g2 = raw(rng);
    let w = &g2 - &u * basis.inner(&g2, &u);
    let w_norm = basis.inner(&w, &w).sqrt();
    if !(w_norm > 1e-9) {
        return Err(OcoError::numerical("degenerate anchor Gram matrix"));
    }
    let w = w / w_norm;

    let norm = TARGET_NORM_FRACTION * cfg.bound;
    let steps = step_sizes(cfg.horizon, cfg.variation, cfg.profile);
    let mut angle = rng.random_range(0.0..std::f64::consts::TAU);
    let mut functions = Vec::with_capacity(cfg.horizon);
    let at = |angle: f64| (&u * angle.cos() + &w * angle.sin()) * norm;
    functions.push(RkhsFunction::new(basis.clone(), at(angle))?);
    for delta in steps {
        // A chord of length delta on the circle of radius `norm`.
        angle += 2.0 * (delta / (2.0 * norm)).asin();
        functions.push(RkhsFunction::new(basis.clone(), at(angle))?);
    }

    let mut losses = Vec::with_capacity(cfg.horizon);
    let mut comparator_losses = Vec::with_capacity(cfg.horizon);
    for f in &functions {
        let x = sample_input(rng);
        let clean = f.eval(&x);
        let noise = if cfg.noise > 0.0 { cfg.noise * rng.sample::<f64, _>(StandardNormal) } else { 0.0 };
        let y = (clean + noise).clamp(-cfg.bound, cfg.bound);
        comparator_losses.push((clean - y).powi(2));
        losses.push(LossFunction::squared_error_kernel(x, y, cfg.bandwidth, cfg.bound)?);
    }
    Ok(Environment { losses, comparators: ComparatorSequence::from_functions(functions)?, comparator_losses })
}

/// Deterministic loss stream and comparator sequence for a seed.
pub fn generate_environment(cfg: &EnvironmentConfig) -> Result<Environment> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    match cfg.kind {
        DriftKind::KernelRegression => kernel_environment(cfg, &mut rng),
        _ => quadratic_environment(cfg, &mut rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::path_variation;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_variation_gives_constant_comparator() {
        for kind in [DriftKind::RandomWalk, DriftKind::PiecewiseConstant, DriftKind::KernelRegression] {
            let env = generate_environment(&EnvironmentConfig::quadratic(kind, 50, 3, 0.0, 1)).unwrap();
            assert_eq!(env.comparators.variation(), 0.0);
            if let Some(points) = env.comparators.points() {
                assert!(points.iter().all(|p| p == &points[0]));
            }
        }
    }

    #[test]
    fn piecewise_variation_is_switches_times_jump() {
        let mut cfg = EnvironmentConfig::quadratic(DriftKind::PiecewiseConstant, 200, 2, 1.5, 9);
        cfg.switches = Some(3);
        let env = generate_environment(&cfg).unwrap();
        let steps = env.comparators.steps();
        let jumps: Vec<f64> = steps.iter().copied().filter(|s| *s > 0.0).collect();
        assert_eq!(jumps.len(), 3);
        for j in jumps {
            assert_abs_diff_eq!(j, 0.5, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(env.comparators.variation(), 1.5, epsilon = 1e-12);
    }

    #[test]
    fn realized_variation_within_five_percent() {
        for seed in 0..50 {
            for (kind, dim) in [
                (DriftKind::RandomWalk, 3),
                (DriftKind::PiecewiseConstant, 2),
                (DriftKind::KernelRegression, 1),
            ] {
                let mut cfg = EnvironmentConfig::quadratic(kind, 120, dim, 4.0, seed);
                cfg.profile = if seed % 2 == 0 { DriftProfile::Uniform } else { DriftProfile::Decaying };
                let env = generate_environment(&cfg).unwrap();
                let realized = path_variation(&env.comparators).unwrap();
                assert!((realized - 4.0).abs() <= 0.05 * 4.0, "{kind:?} seed {seed}: {realized}");
                assert_abs_diff_eq!(realized, env.comparators.variation(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn centers_stay_in_domain() {
        let mut cfg = EnvironmentConfig::quadratic(DriftKind::RandomWalk, 3000, 2, 2500.0, 4);
        cfg.radius = 1.0;
        let env = generate_environment(&cfg).unwrap();
        for loss in &env.losses {
            assert!(loss.center().unwrap().norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn kernel_targets_stay_bounded() {
        let env = generate_environment(&EnvironmentConfig::kernel(300, 2, 10.0, 3)).unwrap();
        for f in env.comparators.functions().unwrap() {
            assert!(f.norm() <= 1.0);
        }
        for (loss, c) in env.losses.iter().zip(&env.comparator_losses) {
            assert!(loss.label().unwrap().abs() <= 1.0);
            assert_eq!(*c, 0.0);
        }
    }

    #[test]
    fn unachievable_targets_rejected() {
        let cfg = EnvironmentConfig::quadratic(DriftKind::RandomWalk, 10, 2, 100.0, 0);
        assert!(matches!(generate_environment(&cfg), Err(OcoError::Config(_))));
        let cfg = EnvironmentConfig::quadratic(DriftKind::RandomWalk, 10, 2, 15.0, 0);
        assert!(matches!(generate_environment(&cfg), Err(OcoError::Config(_))));
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = EnvironmentConfig::quadratic(DriftKind::RandomWalk, 100, 3, 2.0, 77);
        let a = generate_environment(&cfg).unwrap();
        let b = generate_environment(&cfg).unwrap();
        assert_eq!(a.losses, b.losses);
    }
}
