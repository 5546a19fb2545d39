//! Action-selection policies over a shared ridge state.
//!
//! All policies expose the same select/observe contract. The varying
//! confidence level policy scores an action `x` with
//! `<x, estimate> + C (sqrt(d) + alpha(omega)) omega`; the confidence level
//! `alpha` grows with the width `omega`, so poorly explored directions get a
//! proportionally larger bonus than a fixed-level rule would give them.
//!
//! On finite sets selection is an exact scan with lowest-index tie-breaking.
//! On convex sets selection runs the smoothed index through certified
//! projected gradient ascent; a round whose certificate did not reach the
//! configured slack is flagged, not failed.

use rand::Rng;
use rand_chacha::ChaCha12Rng;

use crate::actions::{self, ActionSet};
use crate::error::{Error, Result};
use crate::estimator::{ConfidenceSchedule, SpdState};
use crate::linalg;
use crate::sampling;
use crate::scalar::Scalar;

/// Which selection rule a policy runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyKind {
    /// Varying confidence level UCB.
    VclUcb,
    /// Fixed-radius UCB baseline.
    Oful,
    /// Pure exploitation of the current estimate.
    Greedy,
    /// Uniform play, the sanity control.
    Random,
}

impl PolicyKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::VclUcb => "vcl_ucb",
            Self::Oful => "oful",
            Self::Greedy => "greedy",
            Self::Random => "random",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "vcl_ucb" => Some(Self::VclUcb),
            "oful" => Some(Self::Oful),
            "greedy" => Some(Self::Greedy),
            "random" => Some(Self::Random),
            _ => None,
        }
    }
}

/// Parameters shared by all policy kinds.
#[derive(Debug, Clone)]
pub struct PolicyConfig<S> {
    pub kind: PolicyKind,
    /// The bonus multiplier `C`.
    pub bonus_constant: S,
    pub schedule: ConfidenceSchedule<S>,
    /// Failure probability of the fixed-radius baseline.
    pub oful_delta: S,
    /// Tolerance accepted when maximizing over infinite sets.
    pub argmax_slack: S,
}

impl<S: Scalar> PolicyConfig<S> {
    pub fn new(
        kind: PolicyKind,
        bonus_constant: S,
        schedule: ConfidenceSchedule<S>,
        oful_delta: S,
        argmax_slack: S,
    ) -> Result<Self> {
        if !bonus_constant.is_finite() || bonus_constant <= S::zero() {
            return Err(Error::InvalidParameter {
                what: "bonus_constant",
                value: bonus_constant.to_f64_lossy(),
            });
        }
        if oful_delta.is_nan() || oful_delta <= S::zero() || oful_delta >= S::one() {
            return Err(Error::InvalidParameter {
                what: "oful_delta",
                value: oful_delta.to_f64_lossy(),
            });
        }
        if !argmax_slack.is_finite() || argmax_slack < S::zero() {
            return Err(Error::InvalidParameter {
                what: "argmax_slack",
                value: argmax_slack.to_f64_lossy(),
            });
        }
        Ok(Self {
            kind,
            bonus_constant,
            schedule,
            oful_delta,
            argmax_slack,
        })
    }

    /// Default slack for a horizon: `sqrt(1/T)`.
    pub fn default_slack(horizon: u64) -> S {
        S::cast(1.0 / horizon as f64).sqrt()
    }
}

/// What a selection round reports alongside the chosen action.
#[derive(Debug, Clone)]
pub struct Selection<S> {
    pub action: Vec<S>,
    /// Width of the chosen action under the pre-selection state.
    pub omega: S,
    /// Confidence level actually applied: `alpha` for the VCL rule, the
    /// radius `beta_t` for the baseline, zero for greedy/random.
    pub level: S,
    /// False when the convex optimizer hit its budget before certifying.
    pub opt_converged: bool,
}

/// A policy instance: configuration, ridge state and a private RNG stream
/// used for restarts and uniform play.
#[derive(Debug, Clone)]
pub struct Policy<S> {
    config: PolicyConfig<S>,
    state: SpdState<S>,
    rng: ChaCha12Rng,
}

impl<S: Scalar> Policy<S> {
    pub fn new(config: PolicyConfig<S>, rng: ChaCha12Rng) -> Result<Self> {
        let state = SpdState::new(config.schedule.dim())?;
        Ok(Self { config, state, rng })
    }

    pub fn config(&self) -> &PolicyConfig<S> {
        &self.config
    }

    pub fn state(&self) -> &SpdState<S> {
        &self.state
    }

    pub fn kind(&self) -> PolicyKind {
        self.config.kind
    }

    /// UCB index of the varying confidence level rule. Zero-width actions get
    /// exactly the mean: the bonus `C (sqrt(d) + alpha) omega` vanishes with
    /// `omega` even though `alpha` alone is undefined at zero.
    pub fn ucb_index(&self, action: &[S]) -> Result<S> {
        let omega = self.state.width(action)?;
        let mean = linalg::dot(action, self.state.estimate());
        if omega == S::zero() {
            return Ok(mean);
        }
        let alpha = self.config.schedule.alpha(omega)?;
        let sqrt_d = S::cast(self.state.dim() as f64).sqrt();
        Ok(mean + self.config.bonus_constant * (sqrt_d + alpha) * omega)
    }

    /// Fixed confidence radius of the baseline at the current round.
    pub fn oful_radius(&self) -> S {
        let d = S::cast(self.state.dim() as f64);
        let t = S::cast(self.state.round() as f64);
        (d * ((S::one() + t) / self.config.oful_delta).ln()).sqrt() + S::one()
    }

    /// Index of the fixed-radius baseline: `<x, estimate> + beta_t * omega`.
    pub fn oful_index(&self, action: &[S]) -> Result<S> {
        let omega = self.state.width(action)?;
        let mean = linalg::dot(action, self.state.estimate());
        if omega == S::zero() {
            return Ok(mean);
        }
        Ok(mean + self.oful_radius() * omega)
    }

    /// Picks an action from the set according to the policy kind.
    pub fn select(&mut self, set: &ActionSet<S>) -> Result<Selection<S>> {
        let dim = self.state.dim();
        if set.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: set.dim(),
            });
        }
        let action = match (self.config.kind, set.is_convex()) {
            (PolicyKind::Random, false) => {
                let ActionSet::Finite(members) = set else {
                    unreachable!()
                };
                let i = self.rng.random_range(0..members.len());
                Selected::Done(members[i].clone())
            }
            (PolicyKind::Random, true) => {
                let p = sampling::unit_ball::<S, _>(dim, &mut self.rng);
                Selected::Done(actions::project(set, &p)?)
            }
            (PolicyKind::Greedy, _) => {
                let estimate = self.state.estimate().to_vec();
                Selected::Done(actions::maximize_linear(set, &estimate)?.0)
            }
            (PolicyKind::VclUcb, false) => Selected::Done(self.scan_finite(set, |p, x| {
                p.ucb_index(x)
            })?),
            (PolicyKind::Oful, false) => Selected::Done(self.scan_finite(set, |p, x| {
                p.oful_index(x)
            })?),
            (PolicyKind::VclUcb, true) => {
                // The max-form level is not differentiable; convex sets are
                // always solved with the smoothed level.
                let smoothed = self.config.schedule.smoothed();
                let state = &self.state;
                let c = self.config.bonus_constant;
                let index =
                    move |x: &[S]| actions::index_gradient(state, &smoothed, c, x);
                let (x, report) =
                    actions::maximize_ucb(set, index, self.config.argmax_slack, &mut self.rng)?;
                Selected::Solved(x, report.converged)
            }
            (PolicyKind::Oful, true) => {
                let beta = self.oful_radius();
                let state = &self.state;
                let index = move |x: &[S]| -> Result<(S, Vec<S>)> {
                    let mean = linalg::dot(x, state.estimate());
                    let inv_x = state.gram_inv().matvec(x);
                    let omega = linalg::dot(x, &inv_x).max(S::zero()).sqrt();
                    if omega == S::zero() {
                        return Ok((mean, state.estimate().to_vec()));
                    }
                    let mut grad = state.estimate().to_vec();
                    linalg::axpy(&mut grad, beta / omega, &inv_x);
                    Ok((mean + beta * omega, grad))
                };
                let (x, report) =
                    actions::maximize_ucb(set, index, self.config.argmax_slack, &mut self.rng)?;
                Selected::Solved(x, report.converged)
            }
        };
        let (action, opt_converged) = match action {
            Selected::Done(x) => (x, true),
            Selected::Solved(x, ok) => (x, ok),
        };
        let omega = self.state.width(&action)?;
        let level = match self.config.kind {
            PolicyKind::VclUcb if omega > S::zero() => self.config.schedule.alpha(omega)?,
            PolicyKind::Oful => self.oful_radius(),
            _ => S::zero(),
        };
        Ok(Selection {
            action,
            omega,
            level,
            opt_converged,
        })
    }

    fn scan_finite<F>(&self, set: &ActionSet<S>, score: F) -> Result<Vec<S>>
    where
        F: Fn(&Self, &[S]) -> Result<S>,
    {
        let ActionSet::Finite(members) = set else {
            return Err(Error::NotConvex);
        };
        let mut best = 0;
        let mut best_val = score(self, &members[0])?;
        for (i, m) in members.iter().enumerate().skip(1) {
            let v = score(self, m)?;
            if v > best_val {
                best = i;
                best_val = v;
            }
        }
        Ok(members[best].clone())
    }

    /// Feeds the observed reward back into the ridge state.
    pub fn observe(&mut self, action: &[S], reward: S) -> Result<()> {
        self.state.update(action, reward)
    }
}

enum Selected<S> {
    Done(Vec<S>),
    Solved(Vec<S>, bool),
}
