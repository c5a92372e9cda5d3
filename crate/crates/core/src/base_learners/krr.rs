use crate::kernel_core::GramState;
use crate::{OcoError, Result, Vector};

/// Online kernel ridge regression with predictions clipped to `[-B, B]`.
///
/// The prediction at `x` is `clip(k(x)^T (K + a I)^{-1} y)` over the samples
/// seen so far; the Gram factorization is extended by one row per update.
#[derive(Debug, Clone)]
pub struct KrrLearner {
    gram: GramState,
    labels: Vec<f64>,
    coefficients: Vec<f64>,
    bound: f64,
}

impl KrrLearner {
    pub fn new(ridge: f64, bound: f64, bandwidth: f64) -> Result<Self> {
        if !(bound > 0.0) {
            return Err(OcoError::config(format!("clip level must be positive, got {bound}")));
        }
        Ok(Self {
            gram: GramState::new(bandwidth, ridge)?,
            labels: Vec::new(),
            coefficients: Vec::new(),
            bound,
        })
    }

    pub fn gram(&self) -> &GramState {
        &self.gram
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Unclipped ridge prediction.
    pub fn raw_predict(&self, x: &Vector) -> f64 {
        self.gram
            .kernel_vector(x)
            .iter()
            .zip(&self.coefficients)
            .map(|(k, c)| k * c)
            .sum()
    }

    pub fn predict(&self, x: &Vector) -> f64 {
        if self.labels.is_empty() {
            return 0.0;
        }
        self.raw_predict(x).clamp(-self.bound, self.bound)
    }

    pub fn update(&mut self, x: Vector, y: f64) -> Result<()> {
        if !y.is_finite() || y.abs() > self.bound {
            return Err(OcoError::LabelRange { label: y, bound: self.bound });
        }
        self.gram.push(x)?;
        self.labels.push(y);
        self.coefficients = self.gram.solve(&self.labels)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel_core::{gram_matrix, krr_fit};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_history_predicts_zero() {
        let l = KrrLearner::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(l.predict(&Vector::from_element(2, 3.0)), 0.0);
    }

    #[test]
    fn single_sample_is_clipped() {
        let mut l = KrrLearner::new(1.0, 2.0, 1.0).unwrap();
        let x = Vector::from_element(1, 0.3);
        l.update(x.clone(), 2.0).unwrap();
        assert_abs_diff_eq!(l.predict(&x), 1.0, epsilon = 1e-15);
        // Same stream with a tighter clip level caps the prediction.
        let mut tight = KrrLearner::new(1.0, 0.5, 1.0).unwrap();
        tight.update(x.clone(), 0.5).unwrap();
        assert_abs_diff_eq!(tight.raw_predict(&x), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn rejects_out_of_range_label() {
        let mut l = KrrLearner::new(1.0, 1.0, 1.0).unwrap();
        assert!(matches!(l.update(Vector::zeros(1), 1.1), Err(OcoError::LabelRange { .. })));
        assert!(l.labels().is_empty());
    }

    #[test]
    fn matches_batch_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let (a, sigma) = (0.7, 0.9);
        let mut l = KrrLearner::new(a, 1.0, sigma).unwrap();
        let mut pts = Vec::new();
        let mut ys = Vec::new();
        for _ in 0..5 {
            let x = Vector::from_fn(2, |_, _| rng.random_range(-1.0..1.0));
            let y = rng.random_range(-1.0..1.0);
            l.update(x.clone(), y).unwrap();
            pts.push(x);
            ys.push(y);
        }
        let k = gram_matrix(&pts, sigma).unwrap();
        let coef = krr_fit(&k, &Vector::from_vec(ys), a).unwrap();
        let q = Vector::from_fn(2, |_, _| rng.random_range(-1.0..1.0));
        let batch: f64 = pts
            .iter()
            .zip(coef.iter())
            .map(|(p, c)| c * crate::kernel_core::gaussian_kernel(p, &q, sigma).unwrap())
            .sum();
        assert_abs_diff_eq!(l.raw_predict(&q), batch, epsilon = 1e-12);
        assert_abs_diff_eq!(l.gram().kernel_matrix(), k, epsilon = 1e-12);
    }
}
