//! Base learners aggregated by the meta learner: projected online gradient
//! descent, Online Newton Step, and online clipped kernel ridge regression.

use std::borrow::Cow;

use serde::{Deserialize, Serialize};

use crate::losses::{CurvatureCertificate, LossFunction};
use crate::{OcoError, Result, Vector};

mod krr;
mod ogd;
mod ons;

pub use krr::KrrLearner;
pub use ogd::OgdLearner;
pub use ons::{ons_parameters, OnsLearner};

/// A learner that plays once per round and then sees the revealed loss.
pub trait Expert {
    /// What the learner plays this round. `covariate` is the input revealed
    /// before prediction in regression rounds; a scalar prediction is returned
    /// as a one-dimensional vector.
    fn play(&self, covariate: Option<&Vector>) -> Result<Cow<'_, Vector>>;

    /// Feed the revealed loss of the round just played.
    fn observe(&mut self, loss: &LossFunction) -> Result<()>;
}

#[derive(Debug, Clone)]
pub enum BaseLearner {
    Ogd(OgdLearner),
    Ons(OnsLearner),
    Krr(KrrLearner),
}

impl Expert for BaseLearner {
    fn play(&self, covariate: Option<&Vector>) -> Result<Cow<'_, Vector>> {
        match self {
            BaseLearner::Ogd(l) => Ok(Cow::Borrowed(l.iterate())),
            BaseLearner::Ons(l) => Ok(Cow::Borrowed(l.iterate())),
            BaseLearner::Krr(l) => {
                let x = covariate
                    .ok_or_else(|| OcoError::Unsupported("kernel learners need a covariate".into()))?;
                Ok(Cow::Owned(Vector::from_element(1, l.predict(x))))
            }
        }
    }

    fn observe(&mut self, loss: &LossFunction) -> Result<()> {
        match self {
            BaseLearner::Ogd(l) => {
                let g = loss.grad(l.iterate())?;
                l.step(&g)
            }
            BaseLearner::Ons(l) => {
                let g = loss.grad(l.iterate())?;
                l.step(&g)
            }
            BaseLearner::Krr(l) => {
                let (x, y) = match (loss.covariate(), loss.label()) {
                    (Some(x), Some(y)) => (x, y),
                    _ => return Err(OcoError::Unsupported("kernel learners need labeled rounds".into())),
                };
                l.update(x.clone(), y)
            }
        }
    }
}

/// Recipe for spawning fresh base learners.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LearnerSpec {
    Ogd { dim: usize, curvature: f64, radius: f64 },
    Ons { dim: usize, radius: f64, gamma: f64, epsilon: f64 },
    Krr { ridge: f64, bound: f64, bandwidth: f64 },
}

impl LearnerSpec {
    /// ONS with step parameters derived from a curvature certificate.
    pub fn ons_from_certificate(dim: usize, cert: &CurvatureCertificate) -> Result<Self> {
        let (gamma, epsilon) = ons_parameters(cert)?;
        Ok(LearnerSpec::Ons { dim, radius: cert.diameter / 2.0, gamma, epsilon })
    }

    pub fn spawn(&self) -> Result<BaseLearner> {
        Ok(match *self {
            LearnerSpec::Ogd { dim, curvature, radius } => {
                BaseLearner::Ogd(OgdLearner::new(dim, curvature, radius)?)
            }
            LearnerSpec::Ons { dim, radius, gamma, epsilon } => {
                BaseLearner::Ons(OnsLearner::new(dim, radius, gamma, epsilon)?)
            }
            LearnerSpec::Krr { ridge, bound, bandwidth } => {
                BaseLearner::Krr(KrrLearner::new(ridge, bound, bandwidth)?)
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            LearnerSpec::Ogd { .. } => "ogd",
            LearnerSpec::Ons { .. } => "ons",
            LearnerSpec::Krr { .. } => "krr",
        }
    }
}
