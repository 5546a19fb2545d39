//! Per-round action sets and the two maximizations the simulator needs.
//!
//! An [`ActionSet`] is either a finite list of unit-ball vectors, the unit
//! ball itself, or the unit ball clipped by halfspaces (with a certified
//! interior point). Two solvers operate on it:
//!
//! * [`maximize_linear`] — exact linear maximization, used by the regret
//!   oracle. Closed form for finite sets and the ball; certified projected
//!   gradient ascent for clipped balls.
//! * [`maximize_ucb`] — maximization of a black-box differentiable index,
//!   used by policies on convex sets. Projected gradient ascent with
//!   backtracking line search, restarts, and a gradient-mapping slack
//!   certificate; exhaustive scan on finite sets.
//!
//! Projections onto the clipped ball use Dykstra's alternating scheme, which
//! converges to the true Euclidean projection (plain alternating projections
//! would only find *a* feasible point).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::estimator::{ConfidenceSchedule, SpdState, NORM_SLACK};
use crate::linalg;
use crate::sampling;
use crate::scalar::Scalar;

/// Halfspace constraint `<normal, x> <= offset`.
#[derive(Debug, Clone)]
pub struct Halfspace<S> {
    pub normal: Vec<S>,
    pub offset: S,
}

impl<S: Scalar> Halfspace<S> {
    pub fn new(normal: Vec<S>, offset: S) -> Result<Self> {
        if !linalg::all_finite(&normal) || !offset.is_finite() {
            return Err(Error::NonFinite {
                context: "halfspace",
            });
        }
        if linalg::norm2(&normal) < S::cast(1e-12) {
            return Err(Error::InvalidParameter {
                what: "halfspace normal",
                value: 0.0,
            });
        }
        Ok(Self { normal, offset })
    }

    fn violation(&self, x: &[S]) -> S {
        linalg::dot(&self.normal, x) - self.offset
    }

    /// Euclidean projection onto the halfspace.
    fn project(&self, x: &mut [S]) {
        let v = self.violation(x);
        if v > S::zero() {
            let nn = linalg::dot(&self.normal, &self.normal);
            linalg::axpy(x, -v / nn, &self.normal);
        }
    }
}

/// A round's feasible action set.
#[derive(Debug, Clone)]
pub enum ActionSet<S> {
    /// Explicit list of actions, each inside the unit ball.
    Finite(Vec<Vec<S>>),
    /// The closed Euclidean unit ball.
    UnitBall { dim: usize },
    /// Unit ball intersected with halfspaces; `interior` strictly satisfies
    /// every constraint and lies in the open ball, certifying nonemptiness.
    ClippedBall {
        dim: usize,
        halfspaces: Vec<Halfspace<S>>,
        interior: Vec<S>,
    },
}

impl<S: Scalar> ActionSet<S> {
    pub fn finite(members: Vec<Vec<S>>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyActionSet);
        }
        let dim = members[0].len();
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        for m in &members {
            if m.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: m.len(),
                });
            }
            if !linalg::all_finite(m) {
                return Err(Error::NonFinite { context: "action" });
            }
            let n = linalg::norm2(m);
            if n > S::one() + S::cast(NORM_SLACK) {
                return Err(Error::NormBound {
                    norm: n.to_f64_lossy(),
                });
            }
        }
        Ok(Self::Finite(members))
    }

    pub fn unit_ball(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(Self::UnitBall { dim })
    }

    pub fn clipped_ball(halfspaces: Vec<Halfspace<S>>, interior: Vec<S>) -> Result<Self> {
        let dim = interior.len();
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if !linalg::all_finite(&interior) || linalg::norm2(&interior) >= S::one() {
            return Err(Error::InvalidInterior);
        }
        for h in &halfspaces {
            if h.normal.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: h.normal.len(),
                });
            }
            if h.violation(&interior) >= S::zero() {
                return Err(Error::InvalidInterior);
            }
        }
        Ok(Self::ClippedBall {
            dim,
            halfspaces,
            interior,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Finite(members) => members[0].len(),
            Self::UnitBall { dim } | Self::ClippedBall { dim, .. } => *dim,
        }
    }

    pub fn is_convex(&self) -> bool {
        !matches!(self, Self::Finite(_))
    }

    /// A feasible point to anchor iterative solvers.
    pub fn anchor(&self) -> Vec<S> {
        match self {
            Self::Finite(members) => members[0].clone(),
            Self::UnitBall { dim } => vec![S::zero(); *dim],
            Self::ClippedBall { interior, .. } => interior.clone(),
        }
    }

    /// Membership test up to an absolute tolerance.
    pub fn contains(&self, x: &[S], tol: S) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match self {
            Self::Finite(members) => members.iter().any(|m| {
                let mut d2 = S::zero();
                for (a, b) in m.iter().zip(x.iter()) {
                    let diff = *a - *b;
                    d2 += diff * diff;
                }
                d2.sqrt() <= tol
            }),
            Self::UnitBall { .. } => linalg::norm2(x) <= S::one() + tol,
            Self::ClippedBall { halfspaces, .. } => {
                linalg::norm2(x) <= S::one() + tol
                    && halfspaces
                        .iter()
                        .all(|h| h.violation(x) <= tol * linalg::norm2(&h.normal).max(S::one()))
            }
        }
    }
}

/// Outcome of a certified convex maximization.
#[derive(Debug, Clone)]
pub struct ConvexOptReport<S> {
    pub iterations: usize,
    pub objective: S,
    /// Certified upper bound on `sup F - F(returned)`.
    pub slack_bound: S,
    pub converged: bool,
}

fn project_ball<S: Scalar>(x: &mut [S]) {
    let n = linalg::norm2(x);
    if n > S::one() {
        linalg::scale(x, n.recip());
    }
}

fn worst_violation<S: Scalar>(halfspaces: &[Halfspace<S>], x: &[S]) -> S {
    let mut worst = linalg::norm2(x) - S::one();
    for h in halfspaces {
        worst = worst.max(h.violation(x));
    }
    worst
}

/// Dykstra's alternating projection onto `ball ∩ halfspaces`.
///
/// The correction vectors are what make the limit the true projection. A
/// small full-cycle displacement alone is not a safe stopping rule — the
/// iterate can plateau for many cycles while the corrections keep draining —
/// so termination also requires feasibility. A bounded alternating-projection
/// polish then guarantees the returned point is feasible even if the cycle
/// cap was hit first. The ball is last in both loops, so the result never
/// leaves it.
fn dykstra_project<S: Scalar>(halfspaces: &[Halfspace<S>], point: &[S]) -> Vec<S> {
    let n_sets = halfspaces.len() + 1;
    let dim = point.len();
    let mut x = point.to_vec();
    let scale = linalg::norm2(point).max(S::one());
    let eps = S::cast(1e-13) * scale;
    let feas_tol = S::cast(1e-12) * scale;
    let mut corrections = vec![vec![S::zero(); dim]; n_sets];
    let mut scratch = vec![S::zero(); dim];
    for _cycle in 0..100_000 {
        scratch.copy_from_slice(&x);
        for (k, corr) in corrections.iter_mut().enumerate() {
            // z = x + p_k; y = P_k(z); p_k = z - y; x = y.
            for (xi, pi) in x.iter_mut().zip(corr.iter()) {
                *xi += *pi;
            }
            corr.copy_from_slice(&x);
            if k < halfspaces.len() {
                halfspaces[k].project(&mut x);
            } else {
                project_ball(&mut x);
            }
            for (pi, yi) in corr.iter_mut().zip(x.iter()) {
                *pi -= *yi;
            }
        }
        let mut moved = S::zero();
        for (a, b) in x.iter().zip(scratch.iter()) {
            moved += (*a - *b) * (*a - *b);
        }
        if moved.sqrt() <= eps && worst_violation(halfspaces, &x) <= feas_tol {
            break;
        }
    }
    for _ in 0..1000 {
        if worst_violation(halfspaces, &x) <= feas_tol {
            break;
        }
        for h in halfspaces {
            h.project(&mut x);
        }
        project_ball(&mut x);
    }
    x
}

/// Euclidean projection onto a convex action set.
pub fn project<S: Scalar>(set: &ActionSet<S>, point: &[S]) -> Result<Vec<S>> {
    if point.len() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            got: point.len(),
        });
    }
    match set {
        ActionSet::Finite(_) => Err(Error::NotConvex),
        ActionSet::UnitBall { .. } => {
            let mut x = point.to_vec();
            project_ball(&mut x);
            Ok(x)
        }
        ActionSet::ClippedBall { halfspaces, .. } => Ok(dykstra_project(halfspaces, point)),
    }
}

/// Exact linear maximization `argmax_{x in set} <x, direction>`.
///
/// Finite sets are scanned (ties break to the lowest index), the ball has the
/// closed form `direction / |direction|`, and clipped balls are solved by
/// certified projected gradient ascent to within 1e-9. A zero direction
/// returns value 0 at the set's anchor point.
pub fn maximize_linear<S: Scalar>(set: &ActionSet<S>, direction: &[S]) -> Result<(Vec<S>, S)> {
    if direction.len() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            got: direction.len(),
        });
    }
    match set {
        ActionSet::Finite(members) => {
            let mut best = 0;
            let mut best_val = linalg::dot(&members[0], direction);
            for (i, m) in members.iter().enumerate().skip(1) {
                let v = linalg::dot(m, direction);
                if v > best_val {
                    best = i;
                    best_val = v;
                }
            }
            Ok((members[best].clone(), best_val))
        }
        ActionSet::UnitBall { dim } => {
            let n = linalg::norm2(direction);
            if n == S::zero() {
                return Ok((vec![S::zero(); *dim], S::zero()));
            }
            let x: Vec<S> = direction.iter().map(|v| *v / n).collect();
            Ok((x, n))
        }
        ActionSet::ClippedBall { .. } => {
            let n = linalg::norm2(direction);
            if n == S::zero() {
                return Ok((set.anchor(), S::zero()));
            }
            let index = |x: &[S]| -> Result<(S, Vec<S>)> {
                Ok((linalg::dot(x, direction), direction.to_vec()))
            };
            // Deterministic restarts: this solver must be a pure function.
            let mut rng = ChaCha12Rng::seed_from_u64(0x11b5_01de);
            let (x, report) = maximize_ucb(set, index, S::cast(1e-9), &mut rng)?;
            let value = report.objective;
            Ok((x, value))
        }
    }
}

const PGA_RESTARTS: usize = 3;
const PGA_TOTAL_ITERS: usize = 10_000;
const ARMIJO_C1: f64 = 1e-4;
const BACKTRACK: f64 = 0.5;
const MAX_STEP: f64 = 1e6;
/// Cap on `step * |grad|` per ascent move: twice the set diameter, so it
/// never limits reachability. Projecting from far outside the set erodes
/// the projection tolerance and makes Dykstra crawl, without moving the
/// iterate any further.
const MAX_MOVE: f64 = 4.0;

/// Maximizes a black-box differentiable index over the set.
///
/// Finite sets: exhaustive scan, exact, slack 0. Convex sets: projected
/// gradient ascent from the anchor point plus random restarts, backtracking
/// line search, terminating a start once the gradient-mapping certificate
/// `|x - P(x + grad)| * (diam + |grad|)` drops below `slack`. The returned
/// report carries the certificate recomputed at the best iterate found; when
/// the iteration budget runs out first, `converged` is false and the caller
/// decides what to do with the flagged round.
pub fn maximize_ucb<S, F, R>(
    set: &ActionSet<S>,
    index: F,
    slack: S,
    rng: &mut R,
) -> Result<(Vec<S>, ConvexOptReport<S>)>
where
    S: Scalar,
    F: Fn(&[S]) -> Result<(S, Vec<S>)>,
    R: Rng + ?Sized,
{
    if !slack.is_finite() || slack <= S::zero() {
        return Err(Error::InvalidParameter {
            what: "slack",
            value: slack.to_f64_lossy(),
        });
    }
    if let ActionSet::Finite(members) = set {
        let mut best = 0;
        let mut best_val = index(&members[0])?.0;
        for (i, m) in members.iter().enumerate().skip(1) {
            let v = index(m)?.0;
            if v > best_val {
                best = i;
                best_val = v;
            }
        }
        return Ok((
            members[best].clone(),
            ConvexOptReport {
                iterations: members.len(),
                objective: best_val,
                slack_bound: S::zero(),
                converged: true,
            },
        ));
    }

    let dim = set.dim();
    let diam = S::cast(2.0);
    let mut starts: Vec<Vec<S>> = Vec::with_capacity(PGA_RESTARTS + 2);
    starts.push(set.anchor());
    // A boundary start helps when the anchor is a stationary point of a
    // non-concave index (e.g. the origin under a zero estimate).
    let sphere = sampling::unit_sphere::<S, R>(dim, rng);
    starts.push(project(set, &sphere)?);
    for _ in 0..PGA_RESTARTS {
        let p = sampling::unit_ball::<S, R>(dim, rng);
        starts.push(project(set, &p)?);
    }

    let certificate = |x: &[S], value_grad: &(S, Vec<S>)| -> Result<S> {
        let (_, grad) = value_grad;
        let mut probe = x.to_vec();
        linalg::axpy(&mut probe, S::one(), grad);
        let projected = project(set, &probe)?;
        let mut mapping = S::zero();
        for (p, xi) in projected.iter().zip(x.iter()) {
            mapping += (*p - *xi) * (*p - *xi);
        }
        Ok(mapping.sqrt() * (diam + linalg::norm2(grad)))
    };

    let mut budget = PGA_TOTAL_ITERS;
    let mut iterations = 0usize;
    let mut best_x: Option<Vec<S>> = None;
    let mut best_val = S::neg_infinity();

    for start in starts {
        let mut x = start;
        let mut step = S::one();
        let mut eval = index(&x)?;
        while budget > 0 {
            budget -= 1;
            iterations += 1;
            if !eval.0.is_finite() {
                return Err(Error::NonFinite { context: "index" });
            }
            if certificate(&x, &eval)? <= slack {
                break;
            }
            // Backtracking ascent step.
            let grad_norm = linalg::norm2(&eval.1);
            let mut s = step;
            if grad_norm > S::zero() {
                s = s.min(S::cast(MAX_MOVE) / grad_norm);
            }
            let mut advanced = false;
            for _ in 0..60 {
                let mut y = x.clone();
                linalg::axpy(&mut y, s, &eval.1);
                let y = project(set, &y)?;
                let mut move_sq = S::zero();
                for (a, b) in y.iter().zip(x.iter()) {
                    move_sq += (*a - *b) * (*a - *b);
                }
                if move_sq == S::zero() {
                    break;
                }
                let trial = index(&y)?;
                if trial.0 >= eval.0 + S::cast(ARMIJO_C1) * move_sq / s {
                    x = y;
                    eval = trial;
                    step = (s + s).min(S::cast(MAX_STEP));
                    advanced = true;
                    break;
                }
                s *= S::cast(BACKTRACK);
            }
            if !advanced {
                break;
            }
        }
        if eval.0 > best_val {
            best_val = eval.0;
            best_x = Some(x);
        }
    }

    let best_x = best_x.expect("at least one start");
    let final_eval = index(&best_x)?;
    let slack_bound = certificate(&best_x, &final_eval)?;
    Ok((
        best_x,
        ConvexOptReport {
            iterations,
            objective: final_eval.0,
            slack_bound,
            converged: slack_bound <= slack,
        },
    ))
}

/// Value and gradient of the smoothed UCB index
/// `F(x) = <x, estimate> + C (sqrt(d) + alpha~(omega)) omega`.
///
/// Always evaluates the smoothed confidence level, whatever form `schedule`
/// is configured with; only the smoothed index is differentiable. At
/// `omega = 0` the bonus term vanishes in the limit and the gradient is the
/// bare estimate.
pub fn index_gradient<S: Scalar>(
    state: &SpdState<S>,
    schedule: &ConfidenceSchedule<S>,
    bonus_constant: S,
    x: &[S],
) -> Result<(S, Vec<S>)> {
    if x.len() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            got: x.len(),
        });
    }
    let mean = linalg::dot(x, state.estimate());
    let inv_x = state.gram_inv().matvec(x);
    let omega_sq = linalg::dot(x, &inv_x);
    if omega_sq < -S::cast(1e-12) {
        return Err(Error::QuadFormNegative {
            value: omega_sq.to_f64_lossy(),
        });
    }
    let omega = omega_sq.max(S::zero()).sqrt();
    if omega == S::zero() {
        return Ok((mean, state.estimate().to_vec()));
    }
    let sqrt_d = S::cast(state.dim() as f64).sqrt();
    let (level, slope) = schedule.smooth_alpha_slope(omega);
    let value = mean + bonus_constant * (sqrt_d + level) * omega;
    // d/dx [ g(omega(x)) ] = g'(omega) * gram_inv x / omega.
    let radial = bonus_constant * ((sqrt_d + level) + slope * omega) / omega;
    let mut grad = state.estimate().to_vec();
    linalg::axpy(&mut grad, radial, &inv_x);
    if !value.is_finite() || !linalg::all_finite(&grad) {
        return Err(Error::NonFinite {
            context: "index gradient",
        });
    }
    Ok((value, grad))
}
