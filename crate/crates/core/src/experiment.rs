//! Monte-Carlo experiment runner: replications, aggregation, CSV output.
//!
//! Replications run in a rayon pool but the output is independent of
//! scheduling: replication `r` derives everything it touches from
//! `replication_seed(base, r)` and results are collected in index order.
//!
//! CSV output is byte-deterministic: floats are written with 17 significant
//! digits (`{:.16e}`), which round-trips `f64` exactly, UTF-8, LF line
//! endings.

use std::fs;
use std::path::PathBuf;

use rayon::prelude::*;

use crate::config::{EnvSpec, ExperimentConfig, PolicySpec, ThetaSpec};
use crate::environment::{
    replication_seed, run_episode_seeded, setup_rng, Instance, RoundRecord, SetGenerator,
};
use crate::error::{Error, Result};
use crate::estimator::ConfidenceSchedule;
use crate::linalg;
use crate::policies::PolicyConfig;
use crate::sampling;
use crate::scalar::Scalar;

/// Aggregates for one policy across replications.
#[derive(Debug, Clone)]
pub struct PolicyResult {
    pub name: String,
    /// Final cumulative regret per replication, in replication order.
    pub final_regrets: Vec<f64>,
    /// Per-round mean cumulative regret across replications.
    pub mean_curve: Vec<f64>,
    /// Per-round 10/50/90 percentile cumulative regret.
    pub q10_curve: Vec<f64>,
    pub median_curve: Vec<f64>,
    pub q90_curve: Vec<f64>,
    /// Median of `R_T / sqrt(d^2 T ln T)` across replications.
    pub normalized_median: f64,
    /// Rounds whose convex optimizer missed its certificate.
    pub non_converged_rounds: u64,
}

/// Result of one experiment run.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub policies: Vec<PolicyResult>,
    /// Paths of files written, if an output directory was set.
    pub files: Vec<PathBuf>,
}

/// Linear-interpolation quantile of an unsorted sample.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    assert!(!values.is_empty());
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("non-NaN"));
    let h = (v.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        v[lo]
    } else {
        v[lo] + (h - lo as f64) * (v[hi] - v[lo])
    }
}

pub fn median(values: &[f64]) -> f64 {
    quantile(values, 0.5)
}

/// `R_T / sqrt(d^2 T ln T)`; horizons below 2 use ln 2 to stay finite.
pub fn normalized_regret(final_regret: f64, dim: usize, horizon: u64) -> f64 {
    let t = horizon as f64;
    let log_t = t.ln().max(2f64.ln());
    final_regret / ((dim * dim) as f64 * t * log_t).sqrt()
}

/// Draws the regression vector for one replication.
pub fn realize_theta<S: Scalar>(
    spec: &ThetaSpec,
    dim: usize,
    rng: &mut rand_chacha::ChaCha12Rng,
) -> Result<Vec<S>> {
    match spec {
        ThetaSpec::UniformSphere => Ok(sampling::unit_sphere::<S, _>(dim, rng)),
        ThetaSpec::UniformBall => Ok(sampling::unit_ball::<S, _>(dim, rng)),
        ThetaSpec::Fixed(v) => {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            Ok(v.iter().map(|x| S::cast(*x)).collect())
        }
    }
}

/// Materializes the set generator for one replication.
pub fn realize_generator<S: Scalar>(
    spec: &EnvSpec,
    dim: usize,
    rng: &mut rand_chacha::ChaCha12Rng,
) -> SetGenerator<S> {
    match spec {
        EnvSpec::UnitBall => SetGenerator::UnitBall,
        EnvSpec::IidSphereFinite { arms } => SetGenerator::IidSphereFinite { arms: *arms },
        EnvSpec::FixedFinite { arms } => {
            let members = (0..*arms)
                .map(|_| sampling::unit_sphere::<S, _>(dim, rng))
                .collect();
            SetGenerator::FixedFinite(members)
        }
        EnvSpec::ClippedBall { halfspaces } => SetGenerator::ClippedBall {
            halfspaces: *halfspaces,
        },
    }
}

/// Builds the instance for `(config, replication)`; pure in its arguments.
pub fn build_instance(config: &ExperimentConfig, replication: u32) -> Result<Instance<f64>> {
    let seed = replication_seed(config.seed, replication);
    let mut rng = setup_rng(seed);
    let theta = realize_theta::<f64>(&config.theta, config.dim, &mut rng)?;
    let generator = realize_generator::<f64>(&config.env, config.dim, &mut rng);
    Instance::new(theta, config.noise, config.horizon, generator, seed)
}

/// Translates a policy spec into a runnable policy configuration.
pub fn build_policy_config(spec: &PolicySpec, dim: usize, horizon: u64) -> Result<PolicyConfig<f64>> {
    // The schedule needs ln T > 0; non-VCL policies never read it, so short
    // horizons just get a floor schedule.
    let schedule_horizon = horizon.max(2);
    let schedule = ConfidenceSchedule::new(schedule_horizon, dim, spec.smooth_alpha)?;
    let slack = spec
        .argmax_slack
        .unwrap_or_else(|| PolicyConfig::<f64>::default_slack(horizon));
    PolicyConfig::new(spec.kind, spec.constant_c, schedule, spec.oful_delta, slack)
}

/// Runs all replications of every configured policy, aggregates, and writes
/// CSV files when an output directory is configured.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunResult> {
    config.validate()?;
    let mut policies = Vec::with_capacity(config.policies.len());
    let mut files = Vec::new();

    if let Some(dir) = &config.out_dir {
        fs::create_dir_all(dir)?;
    }

    for spec in &config.policies {
        let policy_config = build_policy_config(spec, config.dim, config.horizon)?;
        let episodes: Vec<Vec<RoundRecord<f64>>> = (0..config.replications)
            .into_par_iter()
            .map(|rep| {
                let instance = build_instance(config, rep)?;
                run_episode_seeded(&instance, &policy_config)
            })
            .collect::<Result<Vec<_>>>()?;

        let result = aggregate(spec.name.clone(), config, &episodes);
        if let Some(dir) = &config.out_dir {
            let path = dir.join(format!("rounds_{}.csv", spec.name));
            fs::write(&path, rounds_csv(&episodes))?;
            files.push(path);
        }
        policies.push(result);
    }

    if let Some(dir) = &config.out_dir {
        let path = dir.join("summary.csv");
        fs::write(&path, summary_csv(config, &policies))?;
        files.push(path);
    }

    Ok(RunResult { policies, files })
}

fn aggregate(
    name: String,
    config: &ExperimentConfig,
    episodes: &[Vec<RoundRecord<f64>>],
) -> PolicyResult {
    let horizon = config.horizon as usize;
    let final_regrets: Vec<f64> = episodes
        .iter()
        .map(|ep| ep.last().map(|r| r.cumulative_regret).unwrap_or(0.0))
        .collect();
    let mut mean_curve = Vec::with_capacity(horizon);
    let mut q10_curve = Vec::with_capacity(horizon);
    let mut median_curve = Vec::with_capacity(horizon);
    let mut q90_curve = Vec::with_capacity(horizon);
    let mut at_t = vec![0.0; episodes.len()];
    for t in 0..horizon {
        for (i, ep) in episodes.iter().enumerate() {
            at_t[i] = ep[t].cumulative_regret;
        }
        mean_curve.push(at_t.iter().sum::<f64>() / at_t.len() as f64);
        q10_curve.push(quantile(&at_t, 0.1));
        median_curve.push(quantile(&at_t, 0.5));
        q90_curve.push(quantile(&at_t, 0.9));
    }
    let normalized: Vec<f64> = final_regrets
        .iter()
        .map(|r| normalized_regret(*r, config.dim, config.horizon))
        .collect();
    let non_converged_rounds = episodes
        .iter()
        .flat_map(|ep| ep.iter())
        .filter(|r| !r.opt_converged)
        .count() as u64;
    PolicyResult {
        name,
        final_regrets,
        mean_curve,
        q10_curve,
        median_curve,
        q90_curve,
        normalized_median: median(&normalized),
        non_converged_rounds,
    }
}

/// 17 significant digits; round-trips f64 exactly.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Per-round CSV for one policy. Schema:
/// `replication,t,omega,alpha,action_norm,reward,instant_regret,cumulative_regret,opt_converged`.
pub fn rounds_csv(episodes: &[Vec<RoundRecord<f64>>]) -> String {
    let mut out = String::with_capacity(episodes.len() * 64 * 16 + 128);
    out.push_str(
        "replication,t,omega,alpha,action_norm,reward,instant_regret,cumulative_regret,opt_converged\n",
    );
    for (rep, episode) in episodes.iter().enumerate() {
        for r in episode {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                rep,
                r.t,
                fmt_float(r.omega),
                fmt_float(r.level),
                fmt_float(linalg::norm2(&r.action)),
                fmt_float(r.reward),
                fmt_float(r.instant_regret),
                fmt_float(r.cumulative_regret),
                r.opt_converged,
            ));
        }
    }
    out
}

/// Summary CSV over all policies. Schema:
/// `policy,d,T,replications,final_regret_mean,final_regret_median,final_regret_q10,final_regret_q90,normalized_regret_median`.
pub fn summary_csv(config: &ExperimentConfig, results: &[PolicyResult]) -> String {
    let mut out = String::new();
    out.push_str(
        "policy,d,T,replications,final_regret_mean,final_regret_median,final_regret_q10,final_regret_q90,normalized_regret_median\n",
    );
    for r in results {
        let mean = r.final_regrets.iter().sum::<f64>() / r.final_regrets.len() as f64;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.name,
            config.dim,
            config.horizon,
            config.replications,
            fmt_float(mean),
            fmt_float(median(&r.final_regrets)),
            fmt_float(quantile(&r.final_regrets, 0.1)),
            fmt_float(quantile(&r.final_regrets, 0.9)),
            fmt_float(r.normalized_median),
        ));
    }
    out
}

/// One parsed row of a per-round CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRound {
    pub replication: u32,
    pub t: u64,
    pub omega: f64,
    pub alpha: f64,
    pub action_norm: f64,
    pub reward: f64,
    pub instant_regret: f64,
    pub cumulative_regret: f64,
    pub opt_converged: bool,
}

/// Parses a per-round CSV back into rows; the inverse of [`rounds_csv`] up to
/// the action vector (only its norm is serialized).
pub fn parse_rounds_csv(text: &str) -> Result<Vec<CsvRound>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Config("empty CSV".into()))?;
    let expected = "replication,t,omega,alpha,action_norm,reward,instant_regret,cumulative_regret,opt_converged";
    if header != expected {
        return Err(Error::Config(format!("unexpected CSV header `{header}`")));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(Error::Config(format!("row {}: expected 9 fields", i + 2)));
        }
        let parse_f = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::Config(format!("row {}: bad float `{s}`", i + 2)))
        };
        rows.push(CsvRound {
            replication: fields[0]
                .parse()
                .map_err(|_| Error::Config(format!("row {}: bad replication", i + 2)))?,
            t: fields[1]
                .parse()
                .map_err(|_| Error::Config(format!("row {}: bad t", i + 2)))?,
            omega: parse_f(fields[2])?,
            alpha: parse_f(fields[3])?,
            action_norm: parse_f(fields[4])?,
            reward: parse_f(fields[5])?,
            instant_regret: parse_f(fields[6])?,
            cumulative_regret: parse_f(fields[7])?,
            opt_converged: match fields[8] {
                "true" => true,
                "false" => false,
                other => {
                    return Err(Error::Config(format!(
                        "row {}: bad opt_converged `{other}`",
                        i + 2
                    )))
                }
            },
        });
    }
    Ok(rows)
}
