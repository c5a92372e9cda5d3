//! Small dense linear-algebra helpers shared by the learners and the kernel
//! calculators.

use log::warn;
use nalgebra::{Cholesky, Dyn, SymmetricEigen};

use crate::{Matrix, OcoError, Result, Vector};

/// Diagonal jitter applied once when a factorization fails.
pub const JITTER: f64 = 1e-10;

/// Cholesky factorization of a symmetric positive definite matrix. On failure
/// the diagonal is shifted by [`JITTER`] once before giving up.
pub fn cholesky_with_jitter(m: &Matrix) -> Result<Cholesky<f64, Dyn>> {
    if let Some(chol) = Cholesky::new(m.clone()) {
        return Ok(chol);
    }
    warn!("cholesky failed on {}x{} matrix, retrying with jitter {JITTER}", m.nrows(), m.ncols());
    let shifted = m + Matrix::identity(m.nrows(), m.ncols()) * JITTER;
    Cholesky::new(shifted)
        .ok_or_else(|| OcoError::numerical("matrix is not positive definite even after jitter"))
}

/// `log |M|` from the diagonal of a Cholesky factor.
pub fn log_det(chol: &Cholesky<f64, Dyn>) -> f64 {
    chol.l_dirty().diagonal().iter().map(|d| 2.0 * d.ln()).sum()
}

/// Euclidean projection onto the centered ball of the given radius.
pub fn project_to_ball(x: &mut Vector, radius: f64) {
    let norm = x.norm();
    if norm > radius {
        *x *= radius / norm;
    }
}

/// Maximum number of bisection steps on the Lagrange multiplier.
const PROJECTION_MAX_ITER: usize = 200;
const PROJECTION_TOL: f64 = 1e-10;

/// Generalized projection `argmin_{|z| <= radius} (z - y)^T A (z - y)` for a
/// symmetric positive definite `A`.
///
/// Outside the ball the minimizer is `z(mu) = (A + mu I)^{-1} A y` for the
/// multiplier `mu >= 0` with `|z(mu)| = radius`. `|z(mu)|` is decreasing in
/// `mu`, so the multiplier is found by bisection in the eigenbasis of `A`.
pub fn mahalanobis_ball_projection(y: &Vector, a: &Matrix, radius: f64) -> Result<Vector> {
    if y.norm() <= radius {
        return Ok(y.clone());
    }
    if radius <= 0.0 {
        return Ok(Vector::zeros(y.len()));
    }
    let eig = SymmetricEigen::new(a.clone());
    let coords = eig.eigenvectors.transpose() * y;
    let lambdas = &eig.eigenvalues;
    if lambdas.iter().any(|l| !(*l > 0.0)) {
        return Err(OcoError::numerical("projection metric is not positive definite"));
    }
    let norm_at = |mu: f64| -> f64 {
        coords
            .iter()
            .zip(lambdas.iter())
            .map(|(c, l)| (l / (l + mu) * c).powi(2))
            .sum::<f64>()
            .sqrt()
    };

    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut guard = 0;
    while norm_at(hi) > radius {
        lo = hi;
        hi *= 2.0;
        guard += 1;
        if guard > 2000 {
            return Err(OcoError::numerical("projection multiplier bracket diverged"));
        }
    }
    for _ in 0..PROJECTION_MAX_ITER {
        if hi - lo <= PROJECTION_TOL * hi.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if norm_at(mid) > radius {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // hi is always on the feasible side.
    let scaled = Vector::from_iterator(
        coords.len(),
        coords.iter().zip(lambdas.iter()).map(|(c, l)| l / (l + hi) * c),
    );
    let mut z = &eig.eigenvectors * scaled;
    project_to_ball(&mut z, radius);
    Ok(z)
}

/// Lower-triangular Cholesky factor that grows by one row at a time.
///
/// Rows are stored separately so appending a row never moves existing
/// entries; both triangular solves only ever walk rows.
#[derive(Debug, Clone, Default)]
pub struct IncrementalCholesky {
    rows: Vec<Vec<f64>>,
}

impl IncrementalCholesky {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Append the factor row for a matrix extended by column `cross`
    /// (against existing rows) and diagonal entry `diag`. Returns `false`
    /// when the Schur complement is not positive, leaving the factor untouched.
    pub fn try_push(&mut self, cross: &[f64], diag: f64) -> bool {
        debug_assert_eq!(cross.len(), self.rows.len());
        let row = self.forward_solve(cross);
        let schur = diag - row.iter().map(|v| v * v).sum::<f64>();
        if !(schur > 0.0) || !schur.is_finite() {
            return false;
        }
        let mut row = row;
        row.push(schur.sqrt());
        self.rows.push(row);
        true
    }

    /// Solve `L w = b`.
    pub fn forward_solve(&self, b: &[f64]) -> Vec<f64> {
        let mut w = Vec::with_capacity(b.len() + 1);
        for (j, row) in self.rows.iter().enumerate() {
            let partial: f64 = row[..j].iter().zip(&w).map(|(l, x)| l * x).sum();
            w.push((b[j] - partial) / row[j]);
        }
        w
    }

    /// Solve `L^T z = w` in place.
    pub fn backward_solve(&self, w: &mut [f64]) {
        for i in (0..self.rows.len()).rev() {
            let row = &self.rows[i];
            w[i] /= row[i];
            let zi = w[i];
            for (m, l) in row[..i].iter().enumerate() {
                w[m] -= l * zi;
            }
        }
    }

    /// Solve `(L L^T) x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut w = self.forward_solve(b);
        self.backward_solve(&mut w);
        w
    }

    pub fn log_det(&self) -> f64 {
        self.rows.iter().enumerate().map(|(i, r)| 2.0 * r[i].ln()).sum()
    }

    /// Replace the factor with a fresh dense factorization of `m`.
    pub fn refactor(&mut self, m: &Matrix) -> Result<()> {
        let chol = cholesky_with_jitter(m)?;
        let l = chol.l_dirty();
        self.rows = (0..m.nrows())
            .map(|i| (0..=i).map(|j| l[(i, j)]).collect())
            .collect();
        Ok(())
    }

    pub fn to_matrix(&self) -> Matrix {
        let n = self.rows.len();
        Matrix::from_fn(n, n, |i, j| if j <= i { self.rows[i][j] } else { 0.0 })
    }
}
