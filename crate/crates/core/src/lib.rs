//! Simulation library for linear contextual bandits with infinite action
//! sets.
//!
//! The policy of interest scores an action `x` with
//! `<x, estimate> + C (sqrt(d) + alpha(omega)) omega`, where
//! `omega = sqrt(x^T gram_inv x)` is the ridge estimator's width in
//! direction `x` and the confidence level `alpha` grows with the width.
//! Around it: an online ridge estimator with rank-one inverse maintenance
//! ([`estimator`]), exact and certified maximization over finite sets, the
//! unit ball and halfspace-clipped balls ([`actions`]), baseline policies
//! ([`policies`]), synthetic environments with per-stream deterministic
//! seeding ([`environment`]), a Monte-Carlo experiment runner with CSV
//! output ([`experiment`]), and structural diagnostics ([`diagnostics`]).
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix `f64`, the precision the harness runs at.

pub mod actions;
pub mod config;
pub mod diagnostics;
pub mod environment;
pub mod error;
pub mod estimator;
pub mod experiment;
pub mod linalg;
pub mod policies;
pub mod sampling;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Ridge state over `f64`, the default precision of the harness.
pub type SpdState64 = estimator::SpdState<f64>;
/// Ridge state over `f32`.
pub type SpdState32 = estimator::SpdState<f32>;
/// Confidence schedule over `f64`.
pub type ConfidenceSchedule64 = estimator::ConfidenceSchedule<f64>;
/// Action set over `f64`.
pub type ActionSet64 = actions::ActionSet<f64>;
/// Policy over `f64`.
pub type Policy64 = policies::Policy<f64>;
/// Policy configuration over `f64`.
pub type PolicyConfig64 = policies::PolicyConfig<f64>;
/// Bandit instance over `f64`.
pub type Instance64 = environment::Instance<f64>;
/// Per-round log entry over `f64`.
pub type RoundRecord64 = environment::RoundRecord<f64>;
