//! Gaussian-kernel primitives and the closed forms behind penalized regret:
//! batch ridge fits, the penalized offline optimum, log-determinant bounds,
//! effective dimension, and the MAP density identity used by the lower bound.

use std::sync::Arc;

use nalgebra::Cholesky;
use serde::{Deserialize, Serialize};

use crate::linalg::{cholesky_with_jitter, log_det, IncrementalCholesky};
use crate::{Matrix, OcoError, Result, Vector};

/// Number of rank-one appends between full refactorizations of a [`GramState`].
pub const REFACTOR_INTERVAL: usize = 512;

/// `exp(-|x - y|^2 / (2 sigma^2))`.
pub fn gaussian_kernel(x: &Vector, y: &Vector, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(OcoError::config(format!("bandwidth must be positive, got {sigma}")));
    }
    if x.len() != y.len() {
        return Err(OcoError::Dimension { expected: x.len(), got: y.len() });
    }
    Ok(gaussian(x, y, sigma))
}

#[inline]
pub(crate) fn gaussian(x: &Vector, y: &Vector, sigma: f64) -> f64 {
    let sq: f64 = x.iter().zip(y.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
    (-sq / (2.0 * sigma * sigma)).exp()
}

/// Dense Gram matrix `K_ij = k(x_i, x_j)`.
pub fn gram_matrix(points: &[Vector], sigma: f64) -> Result<Matrix> {
    if !(sigma > 0.0) {
        return Err(OcoError::config(format!("bandwidth must be positive, got {sigma}")));
    }
    let n = points.len();
    let mut k = Matrix::zeros(n, n);
    for i in 0..n {
        k[(i, i)] = 1.0;
        for j in 0..i {
            let v = gaussian(&points[i], &points[j], sigma);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    Ok(k)
}

/// Kernel matrix over a growing point set together with an incrementally
/// maintained Cholesky factor of `K + a I`.
#[derive(Debug, Clone)]
pub struct GramState {
    sigma: f64,
    ridge: f64,
    points: Vec<Vector>,
    // Lower triangle of K, row i holds K[i, 0..=i].
    kernel_rows: Vec<Vec<f64>>,
    factor: IncrementalCholesky,
    appends_since_refactor: usize,
}

impl GramState {
    pub fn new(sigma: f64, ridge: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(OcoError::config(format!("bandwidth must be positive, got {sigma}")));
        }
        if !(ridge > 0.0) {
            return Err(OcoError::config(format!("ridge must be positive, got {ridge}")));
        }
        Ok(Self {
            sigma,
            ridge,
            points: Vec::new(),
            kernel_rows: Vec::new(),
            factor: IncrementalCholesky::new(),
            appends_since_refactor: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    /// `[k(x_1, x), ..., k(x_n, x)]`.
    pub fn kernel_vector(&self, x: &Vector) -> Vec<f64> {
        self.points.iter().map(|p| gaussian(p, x, self.sigma)).collect()
    }

    /// Add a point, extending `K` by one row and column and updating the
    /// factor of `K + a I` by a rank-one append.
    pub fn push(&mut self, x: Vector) -> Result<()> {
        if let Some(first) = self.points.first() {
            if first.len() != x.len() {
                return Err(OcoError::Dimension { expected: first.len(), got: x.len() });
            }
        }
        let cross = self.kernel_vector(&x);
        let diag = 1.0 + self.ridge;
        let mut row = cross.clone();
        row.push(1.0);
        self.points.push(x);
        self.kernel_rows.push(row);
        self.appends_since_refactor += 1;

        if self.appends_since_refactor >= REFACTOR_INTERVAL {
            return self.refactor();
        }
        if !self.factor.try_push(&cross, diag) {
            return self.refactor();
        }
        Ok(())
    }

    /// Rebuild the factor of `K + a I` from scratch.
    pub fn refactor(&mut self) -> Result<()> {
        let shifted = self.kernel_matrix() + Matrix::identity(self.len(), self.len()) * self.ridge;
        self.factor.refactor(&shifted)?;
        self.appends_since_refactor = 0;
        Ok(())
    }

    pub fn kernel_matrix(&self) -> Matrix {
        let n = self.len();
        Matrix::from_fn(n, n, |i, j| {
            if j <= i {
                self.kernel_rows[i][j]
            } else {
                self.kernel_rows[j][i]
            }
        })
    }

    /// Solve `(K + a I) x = b` with the maintained factor.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.len() {
            return Err(OcoError::Dimension { expected: self.len(), got: b.len() });
        }
        Ok(self.factor.solve(b))
    }

    /// `log |K + a I|`.
    pub fn log_det_shifted(&self) -> f64 {
        self.factor.log_det()
    }

    pub fn factor(&self) -> &IncrementalCholesky {
        &self.factor
    }
}

/// Anchor points and their Gram matrix; the span of `k(anchor_i, .)` hosts
/// the RKHS functions used as comparators.
#[derive(Debug, Clone)]
pub struct KernelBasis {
    anchors: Vec<Vector>,
    sigma: f64,
    gram: Matrix,
}

impl KernelBasis {
    pub fn new(anchors: Vec<Vector>, sigma: f64) -> Result<Self> {
        let gram = gram_matrix(&anchors, sigma)?;
        Ok(Self { anchors, sigma, gram })
    }

    pub fn anchors(&self) -> &[Vector] {
        &self.anchors
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    /// `<f, g>_H = alpha^T K beta` for coefficient vectors over the anchors.
    pub fn inner(&self, alpha: &Vector, beta: &Vector) -> f64 {
        (alpha.transpose() * &self.gram * beta)[0]
    }
}

/// `f(.) = sum_i c_i k(anchor_i, .)`.
#[derive(Debug, Clone)]
pub struct RkhsFunction {
    basis: Arc<KernelBasis>,
    coefficients: Vector,
}

impl RkhsFunction {
    pub fn new(basis: Arc<KernelBasis>, coefficients: Vector) -> Result<Self> {
        if coefficients.len() != basis.len() {
            return Err(OcoError::Dimension { expected: basis.len(), got: coefficients.len() });
        }
        Ok(Self { basis, coefficients })
    }

    pub fn basis(&self) -> &Arc<KernelBasis> {
        &self.basis
    }

    pub fn coefficients(&self) -> &Vector {
        &self.coefficients
    }

    pub fn eval(&self, x: &Vector) -> f64 {
        self.basis
            .anchors
            .iter()
            .zip(self.coefficients.iter())
            .map(|(p, c)| c * gaussian(p, x, self.basis.sigma))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.basis.inner(&self.coefficients, &self.coefficients).max(0.0).sqrt()
    }

    /// RKHS distance to another function over the same basis.
    pub fn distance(&self, other: &RkhsFunction) -> Result<f64> {
        if !Arc::ptr_eq(&self.basis, &other.basis) && self.basis.anchors != other.basis.anchors {
            return Err(OcoError::Unsupported("RKHS distance across different bases".into()));
        }
        let diff = &self.coefficients - &other.coefficients;
        Ok(self.basis.inner(&diff, &diff).max(0.0).sqrt())
    }
}

fn check_ridge(a: f64) -> Result<()> {
    if !(a > 0.0) {
        return Err(OcoError::config(format!("ridge parameter must be positive, got {a}")));
    }
    Ok(())
}

fn check_square(k: &Matrix) -> Result<()> {
    if k.nrows() != k.ncols() {
        return Err(OcoError::Dimension { expected: k.nrows(), got: k.ncols() });
    }
    Ok(())
}

fn shifted_cholesky(k: &Matrix, a: f64) -> Result<Cholesky<f64, nalgebra::Dyn>> {
    check_ridge(a)?;
    check_square(k)?;
    cholesky_with_jitter(&(k + Matrix::identity(k.nrows(), k.ncols()) * a))
}

/// Ridge coefficients `(K + a I)^{-1} y`, which also minimize
/// `|y - K c|^2 + a c^T K c`.
pub fn krr_fit(k: &Matrix, y: &Vector, a: f64) -> Result<Vector> {
    if y.len() != k.nrows() {
        return Err(OcoError::Dimension { expected: k.nrows(), got: y.len() });
    }
    Ok(shifted_cholesky(k, a)?.solve(y))
}

/// `inf_f sum_t (f(x_t) - y_t)^2 + a |f|^2 = a y^T (K + a I)^{-1} y`.
pub fn offline_penalized_optimum(k: &Matrix, y: &Vector, a: f64) -> Result<f64> {
    let coef = krr_fit(k, y, a)?;
    Ok(a * y.dot(&coef))
}

/// `log |I + K / a|`, from the Cholesky factor of `I + K / a`.
pub fn log_det_ratio(k: &Matrix, a: f64) -> Result<f64> {
    check_ridge(a)?;
    check_square(k)?;
    let m = Matrix::identity(k.nrows(), k.ncols()) + k / a;
    let chol = cholesky_with_jitter(&m)?;
    Ok(log_det(&chol).max(0.0))
}

/// Upper bound `4 B^2 log |I + K / a|` on the penalized regret of clipped KRR.
pub fn penalized_regret_upper(k: &Matrix, a: f64, bound: f64) -> Result<f64> {
    if bound < 0.0 {
        return Err(OcoError::config(format!("label bound must be nonnegative, got {bound}")));
    }
    Ok(4.0 * bound * bound * log_det_ratio(k, a)?)
}

/// Lower bound value `log |I + K / a| + 2 log(1 - 1/T)`.
pub fn penalized_regret_lower(k: &Matrix, a: f64, horizon: usize) -> Result<f64> {
    if horizon <= 1 {
        return Err(OcoError::config(format!("lower bound needs T > 1, got {horizon}")));
    }
    let t = horizon as f64;
    Ok(log_det_ratio(k, a)? + 2.0 * (1.0 - 1.0 / t).ln())
}

/// `Tr(K (K + lambda I)^{-1})`.
pub fn effective_dimension(k: &Matrix, lambda: f64) -> Result<f64> {
    let chol = shifted_cholesky(k, lambda)?;
    // K is symmetric, so (K + lambda I)^{-1} K has the same trace and avoids
    // the cancellation in n - lambda Tr((K + lambda I)^{-1}).
    Ok(chol.solve(k).trace())
}

/// Label range `B = sqrt(2 (1 + kappa^2 / a) ln T)` used by the lower bound.
pub fn lb_noise_level(kappa: f64, a: f64, horizon: f64) -> Result<f64> {
    check_ridge(a)?;
    if !(horizon >= 2.0) {
        return Err(OcoError::config(format!("noise level needs T >= 2, got {horizon}")));
    }
    Ok((2.0 * (1.0 + kappa * kappa / a) * horizon.ln()).sqrt())
}

/// Negative log of likelihood times prior at the MAP estimate, without the
/// normalizing constants shared by every label vector.
fn map_neg_log_density(k: &Matrix, chol: &Cholesky<f64, nalgebra::Dyn>, a: f64, y: &Vector) -> f64 {
    let coef = chol.solve(y);
    let fitted = k * &coef;
    let residual = y - fitted;
    // |theta_map|_H^2 = y^T (K + aI)^{-1} K (K + aI)^{-1} y
    let rkhs_sq = coef.dot(&(k * &coef));
    0.5 * residual.norm_squared() + 0.5 * a * rkhs_sq
}

/// `|Delta_actual - Delta_quadform|` for two label vectors, where
/// `Delta_actual` differences `-ln(Q(y | theta_map) q(theta_map))` and
/// `Delta_quadform` differences `y^T (I + K/a)^{-1} y / 2`. The product of
/// likelihood and prior at the MAP is a centered Gaussian in `y` with
/// covariance `I + K/a`, so the result should vanish up to rounding.
pub fn map_density_identity_check(k: &Matrix, a: f64, y1: &Vector, y2: &Vector) -> Result<f64> {
    let chol = shifted_cholesky(k, a)?;
    for y in [y1, y2] {
        if y.len() != k.nrows() {
            return Err(OcoError::Dimension { expected: k.nrows(), got: y.len() });
        }
    }
    let actual = map_neg_log_density(k, &chol, a, y1) - map_neg_log_density(k, &chol, a, y2);

    let cov = Matrix::identity(k.nrows(), k.ncols()) + k / a;
    let cov_chol = cholesky_with_jitter(&cov)?;
    let quad = |y: &Vector| 0.5 * y.dot(&cov_chol.solve(y));
    let quadform = quad(y1) - quad(y2);
    Ok((actual - quadform).abs())
}

/// Penalized-regret bound summary for one Gram matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenalizedBoundReport {
    pub logdet: f64,
    pub upper: f64,
    pub lower: f64,
    pub d_eff: f64,
    pub lambda: f64,
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "T")]
    pub t: usize,
}

impl PenalizedBoundReport {
    pub fn compute(k: &Matrix, a: f64, bound: f64, lambda: f64) -> Result<Self> {
        let t = k.nrows();
        let logdet = log_det_ratio(k, a)?;
        Ok(Self {
            logdet,
            upper: 4.0 * bound * bound * logdet,
            lower: penalized_regret_lower(k, a, t)?,
            d_eff: effective_dimension(k, lambda)?,
            lambda,
            a,
            b: bound,
            t,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::SymmetricEigen;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{E, LN_2};

    fn random_points(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vector> {
        (0..n).map(|_| Vector::from_fn(d, |_, _| rng.random_range(-2.0..2.0))).collect()
    }

    #[test]
    fn kernel_values() {
        let x = Vector::from_vec(vec![0.3, -1.0]);
        assert_eq!(gaussian_kernel(&x, &x, 0.7).unwrap(), 1.0);
        let s = 1.3;
        let y = Vector::from_vec(vec![0.3 + s * 2f64.sqrt(), -1.0]);
        assert_abs_diff_eq!(gaussian_kernel(&x, &y, s).unwrap(), (-1.0f64).exp(), epsilon = 1e-15);
        assert!(matches!(gaussian_kernel(&x, &y, 0.0), Err(OcoError::Config(_))));
        assert!(matches!(gaussian_kernel(&x, &y, -1.0), Err(OcoError::Config(_))));
    }

    #[test]
    fn kernel_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let p = random_points(&mut rng, 2, 3);
            let s = rng.random_range(0.1..3.0);
            let a = gaussian_kernel(&p[0], &p[1], s).unwrap();
            assert_eq!(a, gaussian_kernel(&p[1], &p[0], s).unwrap());
            assert!(a > 0.0 && a <= 1.0);
        }
    }

    #[test]
    fn gram_is_psd_with_unit_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let n = rng.random_range(1..25);
            let pts = random_points(&mut rng, n, 2);
            let k = gram_matrix(&pts, rng.random_range(0.2..2.0)).unwrap();
            assert!(k.diagonal().iter().all(|d| *d == 1.0));
            assert_eq!(k, k.transpose());
            let min = SymmetricEigen::new(k).eigenvalues.min();
            assert!(min >= -1e-10, "min eigenvalue {min}");
        }
    }

    #[test]
    fn gram_state_tracks_dense_gram() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pts = random_points(&mut rng, 40, 2);
        let mut g = GramState::new(0.8, 1.0).unwrap();
        for p in &pts {
            g.push(p.clone()).unwrap();
        }
        let dense = gram_matrix(&pts, 0.8).unwrap();
        assert_abs_diff_eq!(g.kernel_matrix(), dense, epsilon = 1e-12);
        let shifted = &dense + Matrix::identity(40, 40);
        let chol = Cholesky::new(shifted).unwrap();
        assert_abs_diff_eq!(g.factor().to_matrix(), chol.l(), epsilon = 1e-10);
        assert_abs_diff_eq!(g.log_det_shifted(), log_det(&chol), epsilon = 1e-9);
    }

    #[test]
    fn gram_state_refactors_on_schedule() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut g = GramState::new(1.0, 0.5).unwrap();
        let pts = random_points(&mut rng, REFACTOR_INTERVAL + 3, 1);
        for p in &pts {
            g.push(p.clone()).unwrap();
        }
        assert_eq!(g.appends_since_refactor, 3);
        let b: Vec<f64> = (0..g.len()).map(|i| (i as f64).sin()).collect();
        let x = g.solve(&b).unwrap();
        let dense = gram_matrix(&pts, 1.0).unwrap() + Matrix::identity(g.len(), g.len()) * 0.5;
        let resid = &dense * Vector::from_vec(x) - Vector::from_vec(b);
        assert!(resid.amax() < 1e-8);
    }

    #[test]
    fn krr_fit_closed_forms() {
        let k = Matrix::from_element(1, 1, 1.0);
        let c = krr_fit(&k, &Vector::from_element(1, 2.0), 1.0).unwrap();
        assert_abs_diff_eq!(c[0], 1.0, epsilon = 1e-15);
        let y = Vector::from_vec(vec![1.0, -4.0, 0.5]);
        let c = krr_fit(&Matrix::identity(3, 3), &y, 1.0).unwrap();
        assert_abs_diff_eq!(c, y / 2.0, epsilon = 1e-15);
        assert!(matches!(krr_fit(&k, &Vector::from_element(1, 1.0), 0.0), Err(OcoError::Config(_))));
    }

    #[test]
    fn offline_optimum_closed_forms() {
        let k = Matrix::from_element(1, 1, 1.0);
        // (2 - c)^2 + c^2 is minimized at c = 1 with value 2.
        let v = offline_penalized_optimum(&k, &Vector::from_element(1, 2.0), 1.0).unwrap();
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-14);
        let v = offline_penalized_optimum(&Matrix::identity(4, 4), &Vector::zeros(4), 3.0).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn log_det_ratio_closed_forms() {
        assert_abs_diff_eq!(log_det_ratio(&Matrix::identity(5, 5), 1.0).unwrap(), 5.0 * LN_2, epsilon = 1e-14);
        assert_abs_diff_eq!(
            log_det_ratio(&Matrix::from_element(1, 1, 1.0), 1.0).unwrap(),
            LN_2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn log_det_ratio_matches_eigen_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..30 {
            let n = rng.random_range(1..=20);
            let pts = random_points(&mut rng, n, 2);
            let k = gram_matrix(&pts, 1.0).unwrap();
            let a = rng.random_range(0.05..5.0);
            let eig = SymmetricEigen::new(k.clone()).eigenvalues;
            let oracle: f64 = eig.iter().map(|l| (1.0 + l.max(0.0) / a).ln()).sum();
            let v = log_det_ratio(&k, a).unwrap();
            assert!(v >= 0.0);
            assert_abs_diff_eq!(v, oracle, epsilon = 1e-8);
        }
    }

    #[test]
    fn bound_values() {
        let i2 = Matrix::identity(2, 2);
        assert_abs_diff_eq!(penalized_regret_upper(&i2, 1.0, 1.0).unwrap(), 8.0 * LN_2, epsilon = 1e-14);
        assert_eq!(penalized_regret_upper(&i2, 1.0, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(penalized_regret_lower(&i2, 1.0, 2).unwrap(), 0.0, epsilon = 1e-14);
        assert!(penalized_regret_lower(&i2, 1.0, 1).is_err());
        let far = penalized_regret_lower(&i2, 1.0, 10_000_000).unwrap();
        assert_abs_diff_eq!(far, 2.0 * LN_2, epsilon = 1e-6);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let k = gram_matrix(&random_points(&mut rng, 8, 2), 1.0).unwrap();
        let u1 = penalized_regret_upper(&k, 0.7, 1.3).unwrap();
        let u2 = penalized_regret_upper(&k, 0.7, 2.6).unwrap();
        assert_abs_diff_eq!(u2, 4.0 * u1, epsilon = 1e-12);
    }

    #[test]
    fn effective_dimension_values() {
        assert_abs_diff_eq!(effective_dimension(&Matrix::identity(6, 6), 1.0).unwrap(), 3.0, epsilon = 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let n = rng.random_range(1..=20);
            let k = gram_matrix(&random_points(&mut rng, n, 2), 0.9).unwrap();
            let lambda = rng.random_range(0.01..10.0);
            let eig = SymmetricEigen::new(k.clone()).eigenvalues;
            let oracle: f64 = eig.iter().map(|l| l / (l + lambda)).sum();
            let v = effective_dimension(&k, lambda).unwrap();
            assert_abs_diff_eq!(v, oracle, epsilon = 1e-9);
            assert!((0.0..=n as f64).contains(&v));
            let big = effective_dimension(&k, 1e9).unwrap();
            assert!(big <= n as f64 * 1e-8 * k.norm());
        }
    }

    #[test]
    fn noise_level_values_and_monotonicity() {
        assert_abs_diff_eq!(lb_noise_level(1.0, 1.0, E).unwrap(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            lb_noise_level(0.0, 3.0, 50.0).unwrap(),
            (2.0 * 50f64.ln()).sqrt(),
            epsilon = 1e-15
        );
        let grid = [2.0, 3.0, 10.0, 100.0, 1e4];
        for w in grid.windows(2) {
            assert!(lb_noise_level(1.0, 1.0, w[1]).unwrap() > lb_noise_level(1.0, 1.0, w[0]).unwrap());
        }
        for w in [0.0, 0.5, 1.0, 2.0].windows(2) {
            assert!(lb_noise_level(w[1], 1.0, 10.0).unwrap() > lb_noise_level(w[0], 1.0, 10.0).unwrap());
        }
        for w in [0.1, 1.0, 10.0].windows(2) {
            assert!(lb_noise_level(1.0, w[1], 10.0).unwrap() < lb_noise_level(1.0, w[0], 10.0).unwrap());
        }
        assert!(lb_noise_level(1.0, 1.0, 1.5).is_err());
    }

    #[test]
    fn density_identity_degenerate_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let k = gram_matrix(&random_points(&mut rng, 6, 2), 1.0).unwrap();
        let y = Vector::from_fn(6, |_, _| rng.random_range(-1.0..1.0));
        assert_eq!(map_density_identity_check(&k, 0.5, &y, &y).unwrap(), 0.0);
        let zero = Vector::zeros(6);
        assert!(map_density_identity_check(&k, 0.5, &zero, &y).unwrap() < 1e-12);
    }

    #[test]
    fn report_serializes_with_expected_fields() {
        let r = PenalizedBoundReport::compute(&Matrix::identity(3, 3), 1.0, 1.0, 1.0).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        for key in ["logdet", "upper", "lower", "d_eff", "lambda", "a", "B", "T"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        assert_abs_diff_eq!(r.logdet, 3.0 * LN_2, epsilon = 1e-14);
    }
}
