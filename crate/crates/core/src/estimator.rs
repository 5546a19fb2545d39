//! Online ridge-regression state and confidence widths/levels.
//!
//! [`SpdState`] maintains the design matrix `gram = I + sum x_t x_t^T`, its
//! inverse, the reward-weighted moment vector and the ridge estimate, all
//! updated in O(d^2) per round via a rank-one inverse update. A full Cholesky
//! re-factorization runs every [`REFRESH_INTERVAL`] updates (and whenever the
//! rank-one denominator looks corrupted) to keep inverse drift bounded.
//!
//! [`ConfidenceSchedule`] turns a width `omega` into the confidence level
//! `alpha` used by the UCB index, either in the exact max form
//! `sqrt(max(1, ln((T ln T) omega^2 / d)))` or in a smoothed form
//! `sqrt(ln(e + max(0, ln((T ln T) omega^2 / d))))` that is friendlier to
//! gradient-based maximization. The inner logarithm of the smoothed form is
//! clamped at zero so the expression is total on (0, 1] with floor value 1,
//! the same floor as the max form.

use crate::error::{Error, Result};
use crate::linalg::{self, SquareMatrix};
use crate::scalar::Scalar;

/// Updates between full inverse re-factorizations.
pub const REFRESH_INTERVAL: u32 = 512;

/// Tolerance on `max |gram * gram_inv - I|` the maintained inverse must meet.
pub const INVERSE_DRIFT_TOL: f64 = 1e-8;

/// Slack allowed on the unit-norm precondition for actions.
pub const NORM_SLACK: f64 = 1e-12;

/// Ridge-regression state: Gram matrix, maintained inverse, moment vector and
/// current estimate.
#[derive(Debug, Clone)]
pub struct SpdState<S> {
    dim: usize,
    t: u64,
    gram: SquareMatrix<S>,
    gram_inv: SquareMatrix<S>,
    moment: Vec<S>,
    estimate: Vec<S>,
    log_det_acc: S,
    since_refresh: u32,
}

impl<S: Scalar> SpdState<S> {
    /// Fresh state: `gram = I`, `moment = 0`, `estimate = 0`, `t = 0`.
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(Self {
            dim,
            t: 0,
            gram: SquareMatrix::identity(dim),
            gram_inv: SquareMatrix::identity(dim),
            moment: vec![S::zero(); dim],
            estimate: vec![S::zero(); dim],
            log_det_acc: S::zero(),
            since_refresh: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of updates applied so far.
    pub fn round(&self) -> u64 {
        self.t
    }

    pub fn gram(&self) -> &SquareMatrix<S> {
        &self.gram
    }

    pub fn gram_inv(&self) -> &SquareMatrix<S> {
        &self.gram_inv
    }

    pub fn moment(&self) -> &[S] {
        &self.moment
    }

    /// Current ridge estimate `gram_inv * moment`.
    pub fn estimate(&self) -> &[S] {
        &self.estimate
    }

    fn check_action(&self, action: &[S]) -> Result<()> {
        if action.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: action.len(),
            });
        }
        if !linalg::all_finite(action) {
            return Err(Error::NonFinite { context: "action" });
        }
        Ok(())
    }

    /// Applies one observation `(action, reward)`.
    ///
    /// `gram += action action^T`, `moment += reward * action`, the inverse is
    /// updated by the Sherman–Morrison rank-one formula and the estimate is
    /// recomputed. The zero action is a no-op on `gram` and `moment` but still
    /// advances the round counter.
    pub fn update(&mut self, action: &[S], reward: S) -> Result<()> {
        self.check_action(action)?;
        if !reward.is_finite() {
            return Err(Error::NonFinite { context: "reward" });
        }
        let norm = linalg::norm2(action);
        if norm > S::one() + S::cast(NORM_SLACK) {
            return Err(Error::NormBound {
                norm: norm.to_f64_lossy(),
            });
        }

        let inv_action = self.gram_inv.matvec(action);
        let omega_sq = linalg::dot(action, &inv_action);
        let denom = S::one() + omega_sq;

        self.gram.add_outer(action, S::one());
        linalg::axpy(&mut self.moment, reward, action);
        self.t += 1;
        self.since_refresh += 1;

        // denom < 1 can only happen when the maintained inverse has lost
        // positive definiteness; fall back to a full factorization.
        if !denom.is_finite() || denom < S::one() - S::cast(1e-9) {
            self.refactor()?;
            return Ok(());
        }

        // Sherman–Morrison: (A + xx^T)^{-1} = A^{-1} - (A^{-1}x)(A^{-1}x)^T / (1 + x^T A^{-1} x).
        self.gram_inv.add_outer(&inv_action, -denom.recip());
        self.log_det_acc += denom.ln();

        if self.since_refresh >= REFRESH_INTERVAL {
            self.refactor()?;
        } else {
            self.estimate = self.gram_inv.matvec(&self.moment);
        }
        Ok(())
    }

    /// Recomputes the inverse, estimate and log-determinant from a fresh
    /// Cholesky factorization of `gram`.
    pub fn refactor(&mut self) -> Result<()> {
        let chol = self.gram.cholesky()?;
        self.gram_inv = chol.inverse();
        self.estimate = chol.solve(&self.moment);
        self.log_det_acc = chol.log_det();
        self.since_refresh = 0;
        Ok(())
    }

    /// Confidence width `sqrt(action^T gram_inv action)`.
    ///
    /// Values of the quadratic form in `[-1e-12, 0]` are clamped to zero;
    /// anything more negative signals a corrupted inverse and is an error.
    pub fn width(&self, action: &[S]) -> Result<S> {
        self.check_action(action)?;
        let q = self.gram_inv.quad_form(action);
        if q < -S::cast(1e-12) {
            return Err(Error::QuadFormNegative {
                value: q.to_f64_lossy(),
            });
        }
        Ok(q.max(S::zero()).sqrt())
    }

    /// `ln det(gram)` from a fresh, numerically stable factorization.
    pub fn log_det(&self) -> Result<S> {
        Ok(self.gram.cholesky()?.log_det())
    }

    /// The O(1)-per-round accumulator `sum ln(1 + omega_t^2)`, refreshed at
    /// every re-factorization. Cross-checked against [`Self::log_det`] in
    /// tests.
    pub fn log_det_incremental(&self) -> S {
        self.log_det_acc
    }

    /// `max |gram * gram_inv - I|`, the inverse-maintenance drift.
    pub fn identity_deviation(&self) -> S {
        self.gram.identity_deviation(&self.gram_inv)
    }
}

/// Horizon-level parameters of the varying confidence level.
#[derive(Debug, Clone, Copy)]
pub struct ConfidenceSchedule<S> {
    horizon: u64,
    dim: usize,
    smooth: bool,
    /// Precomputed `T ln T / d`.
    scale: S,
}

impl<S: Scalar> ConfidenceSchedule<S> {
    pub fn new(horizon: u64, dim: usize, smooth: bool) -> Result<Self> {
        if horizon < 2 {
            return Err(Error::HorizonTooShort { horizon });
        }
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let t = S::cast(horizon as f64);
        let d = S::cast(dim as f64);
        Ok(Self {
            horizon,
            dim,
            smooth,
            scale: t * t.ln() / d,
        })
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_smooth(&self) -> bool {
        self.smooth
    }

    /// Same horizon and dimension, smoothed form.
    pub fn smoothed(&self) -> Self {
        Self {
            smooth: true,
            ..*self
        }
    }

    /// Same horizon and dimension, exact max form.
    pub fn max_form(&self) -> Self {
        Self {
            smooth: false,
            ..*self
        }
    }

    fn check_omega(&self, omega: S) -> Result<()> {
        if !omega.is_finite() || omega <= S::zero() {
            return Err(Error::NonPositiveWidth {
                omega: omega.to_f64_lossy(),
            });
        }
        Ok(())
    }

    /// Confidence level at width `omega`, in the form selected at construction.
    pub fn alpha(&self, omega: S) -> Result<S> {
        if self.smooth {
            self.alpha_smooth(omega)
        } else {
            self.alpha_max(omega)
        }
    }

    /// Exact form `sqrt(max(1, ln((T ln T) omega^2 / d)))`.
    pub fn alpha_max(&self, omega: S) -> Result<S> {
        self.check_omega(omega)?;
        let z = self.scale * omega * omega;
        Ok(z.ln().max(S::one()).sqrt())
    }

    /// Smoothed form `sqrt(ln(e + max(0, ln((T ln T) omega^2 / d))))`.
    pub fn alpha_smooth(&self, omega: S) -> Result<S> {
        self.check_omega(omega)?;
        Ok(self.smooth_alpha_slope(omega).0)
    }

    /// Smoothed level together with its derivative in `omega`.
    ///
    /// Where the inner clamp is active (`(T ln T) omega^2 / d <= 1`) the level
    /// is the constant 1 and the slope is 0; at the clamp boundary the zero
    /// branch is returned, a valid one-sided derivative.
    pub fn smooth_alpha_slope(&self, omega: S) -> (S, S) {
        let e = S::cast(std::f64::consts::E);
        let z = self.scale * omega * omega;
        let ln_z = z.ln();
        if ln_z <= S::zero() {
            return (S::one(), S::zero());
        }
        let inner = e + ln_z;
        let level = inner.ln().sqrt();
        // d/d omega sqrt(ln(e + ln(scale omega^2)))
        //   = (1 / (2 sqrt(ln inner))) * (1 / inner) * (2 / omega).
        let slope = (level * inner * omega).recip();
        (level, slope)
    }
}
