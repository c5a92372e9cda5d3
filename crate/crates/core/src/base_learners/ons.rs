use crate::linalg::{cholesky_with_jitter, mahalanobis_ball_projection};
use crate::losses::CurvatureCertificate;
use crate::{Matrix, OcoError, Result, Vector};

/// Step parameter `gamma = min(1/(4 G D), alpha) / 2` and initial
/// regularization `epsilon = 1 / (gamma^2 D^2)`.
pub fn ons_parameters(cert: &CurvatureCertificate) -> Result<(f64, f64)> {
    let (g, d, alpha) = (cert.gradient_bound, cert.diameter, cert.exp_concavity);
    if !(g > 0.0 && d > 0.0 && alpha > 0.0) {
        return Err(OcoError::config("ONS needs positive gradient bound, diameter and exp-concavity"));
    }
    let gamma = 0.5 * (1.0 / (4.0 * g * d)).min(alpha);
    Ok((gamma, 1.0 / (gamma * gamma * d * d)))
}

/// Online Newton Step over a centered Euclidean ball.
#[derive(Debug, Clone, PartialEq)]
pub struct OnsLearner {
    iterate: Vector,
    /// `A_t = epsilon I + sum g g^T`
    metric: Matrix,
    gamma: f64,
    epsilon: f64,
    radius: f64,
}

impl OnsLearner {
    pub fn new(dim: usize, radius: f64, gamma: f64, epsilon: f64) -> Result<Self> {
        if !(gamma > 0.0) || !(epsilon > 0.0) {
            return Err(OcoError::config(format!(
                "ONS needs positive gamma and epsilon, got {gamma} and {epsilon}"
            )));
        }
        if !(radius >= 0.0) {
            return Err(OcoError::config(format!("domain radius must be nonnegative, got {radius}")));
        }
        Ok(Self {
            iterate: Vector::zeros(dim),
            metric: Matrix::identity(dim, dim) * epsilon,
            gamma,
            epsilon,
            radius,
        })
    }

    pub fn iterate(&self) -> &Vector {
        &self.iterate
    }

    pub fn metric(&self) -> &Matrix {
        &self.metric
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `A += g g^T`, then a Newton step `x - A^{-1} g / gamma` projected back
    /// onto the ball in the norm induced by `A`.
    pub fn step(&mut self, gradient: &Vector) -> Result<()> {
        if gradient.len() != self.iterate.len() {
            return Err(OcoError::Dimension { expected: self.iterate.len(), got: gradient.len() });
        }
        if gradient.iter().all(|g| *g == 0.0) {
            return Ok(());
        }
        self.metric.ger(1.0, gradient, gradient, 1.0);
        let direction = cholesky_with_jitter(&self.metric)?.solve(gradient);
        let target = &self.iterate - direction / self.gamma;
        self.iterate = mahalanobis_ball_projection(&target, &self.metric, self.radius)?;
        Ok(())
    }
}
