//! Empirical checks of the estimator's structural guarantees.
//!
//! Three diagnostics, each a falsification attempt rather than a proof:
//!
//! * [`diagnostic_elliptical`] — the deterministic width-sum inequality
//!   `sum_t omega_t^2 <= 2 ln det(gram_T)`, checked on random trajectories
//!   with the right-hand side recomputed by factorization so the two sides
//!   take independent numeric routes.
//! * [`diagnostic_tail_bound`] — Monte-Carlo quantiles of the self-normalized
//!   estimation error `|estimate - theta|_gram` against its
//!   `sqrt(d) + sqrt(ln(1/delta))` scaling.
//! * [`scaling_report`] — the regret-growth check: median final regret
//!   normalized by `sqrt(d^2 T ln T)` should be essentially flat in `T` for
//!   the VCL policy and clearly growing for uniform play.

use rayon::prelude::*;

use crate::config::{EnvSpec, PolicySpec, ThetaSpec};
use crate::environment::{
    draw_noise, replication_seed, run_episode_seeded, setup_rng, Instance, NoiseKind,
};
use crate::error::{Error, Result};
use crate::estimator::SpdState;
use crate::experiment::{self, build_policy_config, median, quantile};
use crate::linalg;
use crate::policies::PolicyKind;
use crate::sampling;

/// Outcome of the elliptical-potential sweep.
#[derive(Debug, Clone)]
pub struct EllipticalReport {
    pub trials: u32,
    pub horizon: u64,
    pub dim: usize,
    pub violations: u32,
    /// Largest `lhs / rhs` observed over trials with a positive rhs.
    pub max_ratio: f64,
    /// Seed of the first violating trial, if any.
    pub violating_seed: Option<u64>,
}

impl EllipticalReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Absolute slack allowed on the width-sum inequality.
pub const ELLIPTICAL_TOL: f64 = 1e-9;

/// Checks `sum_t omega_t^2 <= 2 ln det(gram_T)` on `trials` random unit-ball
/// trajectories of length `horizon`.
pub fn diagnostic_elliptical(
    trials: u32,
    horizon: u64,
    dim: usize,
    seed: u64,
) -> Result<EllipticalReport> {
    if trials == 0 || horizon == 0 || dim == 0 {
        return Err(Error::InvalidParameter {
            what: "elliptical diagnostic parameters",
            value: 0.0,
        });
    }
    let outcomes: Vec<(f64, bool)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let trial_seed = replication_seed(seed, trial);
            let mut rng = setup_rng(trial_seed);
            let mut state = SpdState::<f64>::new(dim)?;
            let mut lhs = 0.0;
            for _ in 0..horizon {
                let y: Vec<f64> = sampling::unit_ball(dim, &mut rng);
                let w = state.width(&y)?;
                lhs += w * w;
                state.update(&y, 0.0)?;
            }
            // Factorization route, independent of the widths accumulated above.
            let rhs = 2.0 * state.log_det()?;
            let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
            Ok((ratio, lhs > rhs + ELLIPTICAL_TOL))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = EllipticalReport {
        trials,
        horizon,
        dim,
        violations: 0,
        max_ratio: 0.0,
        violating_seed: None,
    };
    for (trial, (ratio, violated)) in outcomes.iter().enumerate() {
        if *ratio > report.max_ratio {
            report.max_ratio = *ratio;
        }
        if *violated {
            report.violations += 1;
            report
                .violating_seed
                .get_or_insert(replication_seed(seed, trial as u32));
        }
    }
    Ok(report)
}

/// Outcome of the self-normalized tail-bound sweep.
#[derive(Debug, Clone)]
pub struct TailBoundReport {
    pub reps: u32,
    pub round: u64,
    pub dim: usize,
    pub delta: f64,
    /// Empirical (1 - delta) quantile of `|estimate - theta|_gram`.
    pub quantile: f64,
    /// Quantile divided by `sqrt(d) + sqrt(ln(1/delta))`.
    pub ratio: f64,
    pub limit: f64,
}

impl TailBoundReport {
    pub fn passed(&self) -> bool {
        self.ratio <= self.limit
    }
}

/// Runs `reps` episodes of i.i.d. uniform-sphere actions up to `round`
/// (the state after `round - 1` observations, matching the convention that
/// round `t` plays against the estimate built from rounds `1..t-1`) and
/// reports the empirical `(1 - delta)` quantile of the exact supremum
/// `sup_x |x^T (estimate - theta)| / omega_x = |estimate - theta|_gram`.
pub fn diagnostic_tail_bound(
    delta: f64,
    reps: u32,
    round: u64,
    dim: usize,
    seed: u64,
    limit: f64,
) -> Result<TailBoundReport> {
    diagnostic_tail_bound_with_noise(delta, reps, round, dim, seed, limit, Some(NoiseKind::GaussianUnit))
}

/// Same sweep with a configurable noise hook; `None` runs noiseless, which
/// isolates the ridge shrinkage bias term.
pub fn diagnostic_tail_bound_with_noise(
    delta: f64,
    reps: u32,
    round: u64,
    dim: usize,
    seed: u64,
    limit: f64,
    noise: Option<NoiseKind>,
) -> Result<TailBoundReport> {
    if delta.is_nan() || delta <= 0.0 || delta > 0.5 {
        return Err(Error::InvalidParameter {
            what: "delta",
            value: delta,
        });
    }
    if reps < 100 {
        return Err(Error::InvalidParameter {
            what: "reps",
            value: reps as f64,
        });
    }
    if round == 0 || dim == 0 {
        return Err(Error::InvalidParameter {
            what: "tail diagnostic parameters",
            value: 0.0,
        });
    }
    let sups: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let rep_seed = replication_seed(seed, rep);
            let mut rng = setup_rng(rep_seed);
            let theta: Vec<f64> = sampling::unit_sphere(dim, &mut rng);
            let mut state = SpdState::<f64>::new(dim)?;
            for _ in 0..round.saturating_sub(1) {
                let x: Vec<f64> = sampling::unit_sphere(dim, &mut rng);
                let mean = linalg::dot(&x, &theta);
                let xi = match noise {
                    Some(kind) => draw_noise::<f64, _>(kind, &mut rng),
                    None => 0.0,
                };
                state.update(&x, mean + xi)?;
            }
            let err: Vec<f64> = state
                .estimate()
                .iter()
                .zip(theta.iter())
                .map(|(a, b)| a - b)
                .collect();
            Ok(state.gram().quad_form(&err).max(0.0).sqrt())
        })
        .collect::<Result<Vec<_>>>()?;

    let q = quantile(&sups, 1.0 - delta);
    let scale = (dim as f64).sqrt() + (1.0 / delta).ln().sqrt();
    Ok(TailBoundReport {
        reps,
        round,
        dim,
        delta,
        quantile: q,
        ratio: q / scale,
        limit,
    })
}

/// Scaling of one policy across one dimension's horizon ladder.
#[derive(Debug, Clone)]
pub struct ScalingRow {
    pub dim: usize,
    pub horizons: Vec<u64>,
    /// `median R_T / sqrt(d^2 T ln T)` per horizon.
    pub rho: Vec<f64>,
    /// `rho(T_max) / rho(T_min)`.
    pub ratio: f64,
}

/// Outcome of the regret-scaling sweep.
#[derive(Debug, Clone)]
pub struct ScalingReport {
    pub vcl: Vec<ScalingRow>,
    pub control: Vec<ScalingRow>,
    pub ratio_limit: f64,
    pub control_min: f64,
}

impl ScalingReport {
    /// The VCL policy's normalized regret must stay essentially flat while
    /// uniform play's must grow, so the check discriminates.
    pub fn passed(&self) -> bool {
        self.vcl.iter().all(|row| row.ratio <= self.ratio_limit)
            && self.control.iter().all(|row| row.ratio > self.control_min)
    }
}

/// Runs the VCL policy (C = 1) and the uniform-play control over the
/// `dims x horizons` grid on the unit ball with Gaussian noise and
/// per-replication uniform-sphere theta draws.
pub fn scaling_report(
    dims: &[usize],
    horizons: &[u64],
    replications: u32,
    seed: u64,
    ratio_limit: f64,
    control_min: f64,
) -> Result<ScalingReport> {
    if horizons.len() < 3 {
        return Err(Error::InvalidParameter {
            what: "scaling horizons (need at least 3)",
            value: horizons.len() as f64,
        });
    }
    for w in horizons.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidParameter {
                what: "scaling horizons (must increase)",
                value: w[1] as f64,
            });
        }
    }
    // Geometric ladder: consecutive ratios agree to 1%.
    let r0 = horizons[1] as f64 / horizons[0] as f64;
    for w in horizons.windows(2) {
        let r = w[1] as f64 / w[0] as f64;
        if (r / r0 - 1.0).abs() > 0.01 {
            return Err(Error::InvalidParameter {
                what: "scaling horizons (must be geometric)",
                value: r,
            });
        }
    }
    if replications == 0 {
        return Err(Error::InvalidParameter {
            what: "scaling replications",
            value: 0.0,
        });
    }

    let vcl = sweep_policy(PolicyKind::VclUcb, dims, horizons, replications, seed)?;
    let control = sweep_policy(PolicyKind::Random, dims, horizons, replications, seed)?;
    Ok(ScalingReport {
        vcl,
        control,
        ratio_limit,
        control_min,
    })
}

fn sweep_policy(
    kind: PolicyKind,
    dims: &[usize],
    horizons: &[u64],
    replications: u32,
    seed: u64,
) -> Result<Vec<ScalingRow>> {
    let mut rows = Vec::with_capacity(dims.len());
    for &dim in dims {
        let mut rho = Vec::with_capacity(horizons.len());
        for &horizon in horizons {
            let cell_seed = cell_seed(seed, kind, dim, horizon);
            let spec = PolicySpec::defaults(kind);
            let policy_config = build_policy_config(&spec, dim, horizon)?;
            let finals: Vec<f64> = (0..replications)
                .into_par_iter()
                .map(|rep| {
                    let rep_seed = replication_seed(cell_seed, rep);
                    let mut rng = setup_rng(rep_seed);
                    let theta =
                        experiment::realize_theta::<f64>(&ThetaSpec::UniformSphere, dim, &mut rng)?;
                    let generator = experiment::realize_generator::<f64>(
                        &EnvSpec::UnitBall,
                        dim,
                        &mut rng,
                    );
                    let instance = Instance::new(
                        theta,
                        NoiseKind::GaussianUnit,
                        horizon,
                        generator,
                        rep_seed,
                    )?;
                    let records = run_episode_seeded(&instance, &policy_config)?;
                    Ok(records.last().map(|r| r.cumulative_regret).unwrap_or(0.0))
                })
                .collect::<Result<Vec<_>>>()?;
            rho.push(experiment::normalized_regret(median(&finals), dim, horizon));
        }
        let ratio = rho.last().unwrap() / rho.first().unwrap();
        rows.push(ScalingRow {
            dim,
            horizons: horizons.to_vec(),
            rho,
            ratio,
        });
    }
    Ok(rows)
}

/// Mixes the grid coordinates into per-cell seeds (splitmix-style).
fn cell_seed(seed: u64, kind: PolicyKind, dim: usize, horizon: u64) -> u64 {
    let mut z = seed
        ^ (dim as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
        ^ horizon.wrapping_mul(0xbf58_476d_1ce4_e5b9)
        ^ (kind as u64).wrapping_mul(0x94d0_49bb_1331_11eb);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
