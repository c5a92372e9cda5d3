//! Convex losses with explicit curvature certificates.
//!
//! Three families are supported: center-form quadratics
//! `(H/2) |x - c|^2` over a Euclidean ball, squared error of a linear
//! predictor `(w^T v - y)^2` over a Euclidean ball, and squared error of an
//! RKHS function `(f(x) - y)^2` over the RKHS ball of radius `B` for the
//! Gaussian kernel.

use serde::{Deserialize, Serialize};

use crate::kernel_core::{KernelBasis, RkhsFunction};
use crate::{OcoError, Result, Vector, DOMAIN_TOLERANCE};

/// Feasible set of a loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    /// Centered Euclidean ball; the diameter is twice the radius.
    Ball { radius: f64 },
    /// Ball of the given radius in the RKHS norm.
    RkhsBall { radius: f64 },
}

impl Domain {
    pub fn radius(&self) -> f64 {
        match *self {
            Domain::Ball { radius } | Domain::RkhsBall { radius } => radius,
        }
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.radius()
    }

    fn check_norm(&self, norm: f64) -> Result<()> {
        let radius = self.radius();
        if !norm.is_finite() || norm > radius + DOMAIN_TOLERANCE {
            return Err(OcoError::Domain { norm, radius });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LossKind {
    Quadratic { center: Vector, curvature: f64 },
    SquaredErrorLinear { feature: Vector, label: f64 },
    SquaredErrorKernel { point: Vector, label: f64, bandwidth: f64 },
}

/// Curvature constants of a loss over its domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureCertificate {
    /// Strong-convexity modulus, zero if merely convex.
    pub strong_convexity: f64,
    pub exp_concavity: f64,
    /// Bound on the gradient norm over the domain.
    pub gradient_bound: f64,
    pub diameter: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossFunction {
    kind: LossKind,
    domain: Domain,
    /// Shared bound on labels, predictions and the RKHS ball (squared-error kinds).
    label_bound: Option<f64>,
}

fn check_label(label: f64, bound: f64) -> Result<()> {
    if !(bound > 0.0) {
        return Err(OcoError::config(format!("label bound must be positive, got {bound}")));
    }
    if !label.is_finite() || label.abs() > bound {
        return Err(OcoError::LabelRange { label, bound });
    }
    Ok(())
}

impl LossFunction {
    /// `(H/2) |x - c|^2` over the centered ball of the given radius.
    pub fn quadratic(center: Vector, curvature: f64, radius: f64) -> Result<Self> {
        if !(curvature > 0.0) || !curvature.is_finite() {
            return Err(OcoError::config(format!("curvature must be positive, got {curvature}")));
        }
        if !(radius >= 0.0) {
            return Err(OcoError::config(format!("domain radius must be nonnegative, got {radius}")));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(OcoError::config("quadratic center must be finite"));
        }
        Ok(Self {
            kind: LossKind::Quadratic { center, curvature },
            domain: Domain::Ball { radius },
            label_bound: None,
        })
    }

    /// `(w^T v - y)^2` over the centered ball of the given radius. Requires
    /// `radius * |v| <= bound` so every feasible prediction lies in `[-B, B]`.
    pub fn squared_error_linear(feature: Vector, label: f64, radius: f64, bound: f64) -> Result<Self> {
        check_label(label, bound)?;
        if !(radius > 0.0) {
            return Err(OcoError::config(format!("domain radius must be positive, got {radius}")));
        }
        let reach = radius * feature.norm();
        if reach > bound + DOMAIN_TOLERANCE {
            return Err(OcoError::config(format!(
                "feasible predictions reach {reach}, beyond the label bound {bound}"
            )));
        }
        Ok(Self {
            kind: LossKind::SquaredErrorLinear { feature, label },
            domain: Domain::Ball { radius },
            label_bound: Some(bound),
        })
    }

    /// `(f(x) - y)^2` for `f` in the Gaussian RKHS ball of radius `bound`.
    pub fn squared_error_kernel(point: Vector, label: f64, bandwidth: f64, bound: f64) -> Result<Self> {
        check_label(label, bound)?;
        if !(bandwidth > 0.0) {
            return Err(OcoError::config(format!("bandwidth must be positive, got {bandwidth}")));
        }
        Ok(Self {
            kind: LossKind::SquaredErrorKernel { point, label, bandwidth },
            domain: Domain::RkhsBall { radius: bound },
            label_bound: Some(bound),
        })
    }

    pub fn kind(&self) -> &LossKind {
        &self.kind
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn label_bound(&self) -> Option<f64> {
        self.label_bound
    }

    /// Euclidean dimension of the decision set, if it has one.
    pub fn dim(&self) -> Option<usize> {
        match &self.kind {
            LossKind::Quadratic { center, .. } => Some(center.len()),
            LossKind::SquaredErrorLinear { feature, .. } => Some(feature.len()),
            LossKind::SquaredErrorKernel { .. } => None,
        }
    }

    /// Covariate revealed before the learner predicts (kernel regression only).
    pub fn covariate(&self) -> Option<&Vector> {
        match &self.kind {
            LossKind::SquaredErrorKernel { point, .. } => Some(point),
            _ => None,
        }
    }

    pub fn label(&self) -> Option<f64> {
        match self.kind {
            LossKind::SquaredErrorLinear { label, .. } | LossKind::SquaredErrorKernel { label, .. } => {
                Some(label)
            }
            LossKind::Quadratic { .. } => None,
        }
    }

    /// Unconstrained minimizer of a quadratic loss.
    pub fn center(&self) -> Option<&Vector> {
        match &self.kind {
            LossKind::Quadratic { center, .. } => Some(center),
            _ => None,
        }
    }

    fn check_point(&self, x: &Vector) -> Result<()> {
        let dim = match self.dim() {
            Some(d) => d,
            None => {
                return Err(OcoError::Unsupported(
                    "kernel losses are evaluated on RKHS functions or predictions".into(),
                ))
            }
        };
        if x.len() != dim {
            return Err(OcoError::Dimension { expected: dim, got: x.len() });
        }
        self.domain.check_norm(x.norm())
    }

    /// `f(x)` for a point of the Euclidean decision set.
    pub fn eval(&self, x: &Vector) -> Result<f64> {
        self.check_point(x)?;
        Ok(match &self.kind {
            LossKind::Quadratic { center, curvature } => {
                let sq: f64 = x.iter().zip(center.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
                0.5 * curvature * sq
            }
            LossKind::SquaredErrorLinear { feature, label } => (x.dot(feature) - label).powi(2),
            LossKind::SquaredErrorKernel { .. } => unreachable!("rejected by check_point"),
        })
    }

    /// `grad f(x)` for a point of the Euclidean decision set.
    pub fn grad(&self, x: &Vector) -> Result<Vector> {
        self.check_point(x)?;
        Ok(match &self.kind {
            LossKind::Quadratic { center, curvature } => (x - center) * *curvature,
            LossKind::SquaredErrorLinear { feature, label } => feature * (2.0 * (x.dot(feature) - label)),
            LossKind::SquaredErrorKernel { .. } => unreachable!("rejected by check_point"),
        })
    }

    /// Squared error of a scalar prediction.
    pub fn eval_prediction(&self, prediction: f64) -> Result<f64> {
        match self.label() {
            Some(label) => Ok((prediction - label).powi(2)),
            None => Err(OcoError::Unsupported("quadratic losses have no label".into())),
        }
    }

    /// Loss of whatever a learner plays: a point for Euclidean losses, a
    /// one-dimensional prediction for kernel regression.
    pub fn evaluate_play(&self, play: &Vector) -> Result<f64> {
        match self.kind {
            LossKind::SquaredErrorKernel { .. } => {
                if play.len() != 1 {
                    return Err(OcoError::Dimension { expected: 1, got: play.len() });
                }
                self.eval_prediction(play[0])
            }
            _ => self.eval(play),
        }
    }

    fn kernel_parts(&self) -> Result<(&Vector, f64, f64)> {
        match &self.kind {
            LossKind::SquaredErrorKernel { point, label, bandwidth } => Ok((point, *label, *bandwidth)),
            _ => Err(OcoError::Unsupported("not a kernel loss".into())),
        }
    }

    /// `(f(x_t) - y_t)^2` for `f` in the RKHS ball.
    pub fn eval_function(&self, f: &RkhsFunction) -> Result<f64> {
        let (point, label, bandwidth) = self.kernel_parts()?;
        if (f.basis().sigma() - bandwidth).abs() > 0.0 {
            return Err(OcoError::config("RKHS function bandwidth differs from the loss bandwidth"));
        }
        self.domain.check_norm(f.norm())?;
        Ok((f.eval(point) - label).powi(2))
    }

    /// RKHS gradient `2 (f(x_t) - y_t) k(x_t, .)`, returned as its single
    /// coefficient over the anchor `x_t`.
    pub fn grad_function(&self, f: &RkhsFunction) -> Result<RkhsFunction> {
        let (point, label, bandwidth) = self.kernel_parts()?;
        self.domain.check_norm(f.norm())?;
        let scale = 2.0 * (f.eval(point) - label);
        let basis = std::sync::Arc::new(KernelBasis::new(vec![point.clone()], bandwidth)?);
        RkhsFunction::new(basis, Vector::from_element(1, scale))
    }

    /// Directional derivative `<g - f, grad l(f)>_H` for kernel losses.
    pub fn directional_derivative(&self, f: &RkhsFunction, g: &RkhsFunction) -> Result<f64> {
        let (point, label, _) = self.kernel_parts()?;
        // <h, k(x_t, .)>_H = h(x_t) by the reproducing property.
        Ok(2.0 * (f.eval(point) - label) * (g.eval(point) - f.eval(point)))
    }

    /// Curvature constants over the domain.
    pub fn certify(&self) -> Result<CurvatureCertificate> {
        let radius = self.domain.radius();
        if !(radius > 0.0) {
            return Err(OcoError::config("degenerate domain: radius must be positive"));
        }
        match &self.kind {
            LossKind::Quadratic { center, curvature } => {
                // max over the ball of |H (x - c)| is attained opposite the center.
                let gradient_bound = curvature * (radius + center.norm());
                if !(gradient_bound > 0.0) {
                    return Err(OcoError::config("gradient bound is zero"));
                }
                Ok(CurvatureCertificate {
                    strong_convexity: *curvature,
                    exp_concavity: curvature / (gradient_bound * gradient_bound),
                    gradient_bound,
                    diameter: self.domain.diameter(),
                })
            }
            LossKind::SquaredErrorLinear { .. } | LossKind::SquaredErrorKernel { .. } => {
                let b = self.label_bound.expect("squared-error losses carry a bound");
                Ok(CurvatureCertificate {
                    strong_convexity: 0.0,
                    exp_concavity: 1.0 / (8.0 * b * b),
                    gradient_bound: 2.0 * b * b,
                    diameter: self.domain.diameter(),
                })
            }
        }
    }
}
