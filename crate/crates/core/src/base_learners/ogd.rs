use crate::linalg::project_to_ball;
use crate::{OcoError, Result, Vector};

/// Projected online gradient descent with step size `1 / (H t)`, where `t`
/// counts rounds since this learner started.
#[derive(Debug, Clone, PartialEq)]
pub struct OgdLearner {
    iterate: Vector,
    round: usize,
    curvature: f64,
    radius: f64,
}

impl OgdLearner {
    /// Starts at the center of the ball with the local clock at 1.
    pub fn new(dim: usize, curvature: f64, radius: f64) -> Result<Self> {
        if !(curvature > 0.0) {
            return Err(OcoError::config(format!("OGD needs positive curvature, got {curvature}")));
        }
        if !(radius >= 0.0) {
            return Err(OcoError::config(format!("domain radius must be nonnegative, got {radius}")));
        }
        Ok(Self { iterate: Vector::zeros(dim), round: 1, curvature, radius })
    }

    pub fn iterate(&self) -> &Vector {
        &self.iterate
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn step(&mut self, gradient: &Vector) -> Result<()> {
        if gradient.len() != self.iterate.len() {
            return Err(OcoError::Dimension { expected: self.iterate.len(), got: gradient.len() });
        }
        let eta = 1.0 / (self.curvature * self.round as f64);
        self.iterate.axpy(-eta, gradient, 1.0);
        project_to_ball(&mut self.iterate, self.radius);
        self.round += 1;
        Ok(())
    }
}
