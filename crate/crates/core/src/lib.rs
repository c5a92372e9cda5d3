//! Strongly adaptive online convex optimization.
//!
//! The crate bundles the pieces needed to study dynamic regret of strongly
//! adaptive learners:
//!
//! - [`losses`]: quadratic and squared-error losses with curvature certificates.
//! - [`base_learners`]: projected OGD, Online Newton Step and online clipped
//!   kernel ridge regression.
//! - [`meta_flh`]: the Follow-the-Leading-History meta learner and its
//!   geometric-lifetime pruning schedule.
//! - [`kernel_core`]: Gaussian Gram matrices, batch ridge closed forms and
//!   penalized-regret bound calculators.
//! - [`bench`]: drifting environments, comparator sequences, path and
//!   functional variation, bin partitioning and regret accounting.
//! - [`experiment`]: JSON-configured experiment runs and sweeps behind the
//!   `oco` binary.

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod base_learners;
pub mod bench;
pub mod error;
pub mod experiment;
pub mod kernel_core;
pub mod linalg;
pub mod losses;
pub mod meta_flh;

pub use error::{OcoError, Result};

/// Points in the Euclidean decision set, covariates and RKHS coefficient
/// vectors all use the same dense column vector.
pub type Vector = nalgebra::DVector<f64>;
pub type Matrix = nalgebra::DMatrix<f64>;

/// Absolute slack allowed on norm constraints before a point is rejected.
pub const DOMAIN_TOLERANCE: f64 = 1e-9;
