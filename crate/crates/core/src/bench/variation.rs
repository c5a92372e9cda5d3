use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::kernel_core::RkhsFunction;
use crate::losses::{LossFunction, LossKind};
use crate::{OcoError, Result, Vector};

#[derive(Debug, Clone)]
enum Comparators {
    Points(Vec<Vector>),
    Functions(Vec<RkhsFunction>),
}

/// Comparator sequence `z_1..z_T` with its path variation cached.
#[derive(Debug, Clone)]
pub struct ComparatorSequence {
    comparators: Comparators,
    steps: Vec<f64>,
    variation: f64,
}

impl ComparatorSequence {
    pub fn from_points(points: Vec<Vector>) -> Result<Self> {
        if let Some(first) = points.first() {
            if let Some(bad) = points.iter().find(|p| p.len() != first.len()) {
                return Err(OcoError::Dimension { expected: first.len(), got: bad.len() });
            }
        }
        let steps = points.windows(2).map(|w| (&w[1] - &w[0]).norm()).collect();
        Ok(Self::with_steps(Comparators::Points(points), steps))
    }

    /// Functions must share one kernel basis; steps are measured in the RKHS norm.
    pub fn from_functions(functions: Vec<RkhsFunction>) -> Result<Self> {
        let steps = functions
            .windows(2)
            .map(|w| w[1].distance(&w[0]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::with_steps(Comparators::Functions(functions), steps))
    }

    fn with_steps(comparators: Comparators, steps: Vec<f64>) -> Self {
        let variation = steps.iter().sum();
        Self { comparators, steps, variation }
    }

    pub fn len(&self) -> usize {
        match &self.comparators {
            Comparators::Points(p) => p.len(),
            Comparators::Functions(f) => f.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cached path variation.
    pub fn variation(&self) -> f64 {
        self.variation
    }

    /// `|z_t - z_{t-1}|` for `t = 2..=T`.
    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn points(&self) -> Option<&[Vector]> {
        match &self.comparators {
            Comparators::Points(p) => Some(p),
            Comparators::Functions(_) => None,
        }
    }

    pub fn functions(&self) -> Option<&[RkhsFunction]> {
        match &self.comparators {
            Comparators::Functions(f) => Some(f),
            Comparators::Points(_) => None,
        }
    }
}

/// `sum_{t=2}^T |z_t - z_{t-1}|`, recomputed from the comparators.
pub fn path_variation(z: &ComparatorSequence) -> Result<f64> {
    match &z.comparators {
        Comparators::Points(p) => Ok(p.windows(2).map(|w| (&w[1] - &w[0]).norm()).sum()),
        Comparators::Functions(f) => f.windows(2).map(|w| w[1].distance(&w[0])).sum(),
    }
}

/// `sum_t max_{x in probes} |f_t(x) - f_{t-1}(x)|`, a lower approximation of
/// the sup over the domain.
pub fn functional_variation_probed(losses: &[LossFunction], probes: &[Vector]) -> Result<f64> {
    if probes.is_empty() {
        return Err(OcoError::config("probe set is empty"));
    }
    let mut total = 0.0;
    let mut previous: Option<Vec<f64>> = None;
    for loss in losses {
        let values = probes.iter().map(|p| loss.eval(p)).collect::<Result<Vec<_>>>()?;
        if let Some(prev) = &previous {
            total += values.iter().zip(prev).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        }
        previous = Some(values);
    }
    Ok(total)
}

/// Exact sup of `|f_t - f_{t-1}|` over the ball for quadratics sharing a
/// curvature and a domain. The difference is affine,
/// `H x^T (c_{t-1} - c_t) + (H/2)(|c_t|^2 - |c_{t-1}|^2)`, so its sup over the
/// ball is `|offset| + H R |c_t - c_{t-1}|`.
fn quadratic_functional_variation(losses: &[LossFunction]) -> Option<f64> {
    let first = losses.first()?;
    let radius = first.domain().radius();
    let curvature = match first.kind() {
        LossKind::Quadratic { curvature, .. } => *curvature,
        _ => return None,
    };
    let mut centers = Vec::with_capacity(losses.len());
    for loss in losses {
        match loss.kind() {
            LossKind::Quadratic { center, curvature: h } if *h == curvature && loss.domain() == first.domain() => {
                centers.push(center)
            }
            _ => return None,
        }
    }
    Some(
        centers
            .windows(2)
            .map(|w| {
                let offset = 0.5 * curvature * (w[1].norm_squared() - w[0].norm_squared());
                offset.abs() + curvature * radius * (w[1] - w[0]).norm()
            })
            .sum(),
    )
}

/// Functional variation of a loss sequence: closed form for quadratics of a
/// common curvature, otherwise the probe approximation.
pub fn functional_variation(losses: &[LossFunction], probes: &[Vector]) -> Result<f64> {
    if probes.is_empty() {
        return Err(OcoError::config("probe set is empty"));
    }
    match quadratic_functional_variation(losses) {
        Some(v) => Ok(v),
        None => functional_variation_probed(losses, probes),
    }
}

/// Probe points in the centered ball: the `2 d` axis endpoints followed by
/// random points, alternating between the sphere and the interior. Smaller
/// sets are prefixes of larger ones for the same seed.
pub fn probe_grid(radius: f64, dim: usize, count: usize, seed: u64) -> Vec<Vector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probes = Vec::with_capacity(count);
    for axis in 0..dim {
        for sign in [1.0, -1.0] {
            let mut p = Vector::zeros(dim);
            p[axis] = sign * radius;
            probes.push(p);
        }
    }
    let mut k = 0usize;
    while probes.len() < count {
        let mut p = Vector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = p.norm().max(f64::MIN_POSITIVE);
        let r = if k.is_multiple_of(2) { radius } else { radius * rng.random::<f64>().powf(1.0 / dim as f64) };
        p *= r / norm;
        probes.push(p);
        k += 1;
    }
    probes.truncate(count);
    probes
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn scalars(xs: &[f64]) -> Vec<Vector> {
        xs.iter().map(|x| Vector::from_element(1, *x)).collect()
    }

    #[test]
    fn path_variation_examples() {
        let constant = ComparatorSequence::from_points(scalars(&[2.0; 6])).unwrap();
        assert_eq!(path_variation(&constant).unwrap(), 0.0);
        let z = ComparatorSequence::from_points(scalars(&[0.0, 1.0, 3.0])).unwrap();
        assert_eq!(path_variation(&z).unwrap(), 3.0);
        assert_eq!(z.variation(), 3.0);
        let single = ComparatorSequence::from_points(scalars(&[1.0])).unwrap();
        assert_eq!(single.variation(), 0.0);
    }

    #[test]
    fn path_variation_matches_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let mut pts = vec![Vector::zeros(3)];
        for _ in 1..100 {
            let step = Vector::from_fn(3, |_, _| rng.random_range(-0.1..0.1));
            let next = pts.last().unwrap() + step;
            pts.push(next);
        }
        let mut oracle = 0.0;
        for t in 1..pts.len() {
            let sq: f64 = pts[t].iter().zip(&pts[t - 1]).map(|(a, b)| (a - b).powi(2)).sum();
            oracle += f64::sqrt(sq);
        }
        let z = ComparatorSequence::from_points(pts).unwrap();
        assert_abs_diff_eq!(z.variation(), oracle, epsilon = 1e-12);
        assert_abs_diff_eq!(path_variation(&z).unwrap(), z.variation(), epsilon = 1e-12);
    }

    #[test]
    fn functional_variation_examples() {
        let q = |c: f64| LossFunction::quadratic(Vector::from_element(1, c), 2.0, 1.0).unwrap();
        let probes = probe_grid(1.0, 1, 16, 0);
        assert_eq!(functional_variation(&[q(0.3), q(0.3), q(0.3)], &probes).unwrap(), 0.0);
        assert_abs_diff_eq!(functional_variation(&[q(0.0), q(1.0)], &probes).unwrap(), 3.0, epsilon = 1e-15);
        assert!(functional_variation(&[q(0.0), q(1.0)], &[]).is_err());
        // The endpoint -1 is always probed, where the sup is attained.
        assert_abs_diff_eq!(functional_variation_probed(&[q(0.0), q(1.0)], &probes).unwrap(), 3.0, epsilon = 1e-15);
    }

    #[test]
    fn probed_value_is_a_lower_approximation() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        for _ in 0..50 {
            let d = rng.random_range(1..4);
            let h = rng.random_range(0.5..2.0);
            let losses: Vec<LossFunction> = (0..2)
                .map(|_| {
                    let mut c = Vector::from_fn(d, |_, _| rng.random_range(-1.0..1.0));
                    crate::linalg::project_to_ball(&mut c, 1.0);
                    LossFunction::quadratic(c, h, 1.0).unwrap()
                })
                .collect();
            let probes = probe_grid(1.0, d, 128, rng.random());
            let exact = functional_variation(&losses, &probes).unwrap();
            let approx = functional_variation_probed(&losses, &probes).unwrap();
            assert!(approx <= exact + 1e-12);
        }
    }

    #[test]
    fn probed_value_monotone_in_probe_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        let losses: Vec<LossFunction> = (0..20)
            .map(|_| {
                let mut c = Vector::from_fn(2, |_, _| rng.random_range(-1.0..1.0));
                crate::linalg::project_to_ball(&mut c, 1.0);
                LossFunction::quadratic(c, rng.random_range(0.5..2.0), 1.0).unwrap()
            })
            .collect();
        let mut last = 0.0;
        for n in [1, 2, 4, 8, 16, 64, 128, 256] {
            let v = functional_variation_probed(&losses, &probe_grid(1.0, 2, n, 5)).unwrap();
            assert!(v >= last);
            last = v;
        }
    }
}
