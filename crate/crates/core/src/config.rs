//! Flat key-value experiment configuration.
//!
//! The format is a deliberately rigid text file: `key = value` lines, `#`
//! comments, and one `[policy]` section per policy. Keys outside a section
//! configure the experiment and the diagnostics; keys inside a section
//! configure that policy. Every key has a default; unknown keys and duplicate
//! keys are hard errors so a config never silently drifts.
//!
//! ```text
//! dim = 5
//! horizon = 4096
//! replications = 20
//! seed = 42
//! env = unit_ball            # unit_ball | finite:<k> | fixed_finite:<k> | clipped_ball:<m>
//! noise = gaussian           # gaussian | rademacher | uniform
//! theta = uniform_sphere     # uniform_sphere | uniform_ball | fixed:<v1,v2,...>
//!
//! [policy]
//! kind = vcl_ucb             # vcl_ucb | oful | greedy | random
//! constant_c = 1.0
//! ```

use std::collections::HashSet;
use std::path::PathBuf;

use crate::environment::NoiseKind;
use crate::error::{Error, Result};
use crate::policies::PolicyKind;

/// How the unknown regression vector is drawn per replication.
#[derive(Debug, Clone, PartialEq)]
pub enum ThetaSpec {
    UniformSphere,
    UniformBall,
    Fixed(Vec<f64>),
}

/// Which action-set family each round uses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnvSpec {
    UnitBall,
    /// `arms` fresh uniform-sphere points every round.
    IidSphereFinite { arms: usize },
    /// `arms` sphere points drawn once per replication, fixed across rounds.
    FixedFinite { arms: usize },
    /// Random clipped ball with this many halfspaces every round.
    ClippedBall { halfspaces: usize },
}

impl EnvSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let bad = |s: &str| Error::Config(format!("invalid env spec `{s}`"));
        if s == "unit_ball" {
            return Ok(Self::UnitBall);
        }
        if let Some(k) = s.strip_prefix("finite:") {
            let arms: usize = k.parse().map_err(|_| bad(s))?;
            if arms == 0 {
                return Err(bad(s));
            }
            return Ok(Self::IidSphereFinite { arms });
        }
        if let Some(k) = s.strip_prefix("fixed_finite:") {
            let arms: usize = k.parse().map_err(|_| bad(s))?;
            if arms == 0 {
                return Err(bad(s));
            }
            return Ok(Self::FixedFinite { arms });
        }
        if let Some(m) = s.strip_prefix("clipped_ball:") {
            let halfspaces: usize = m.parse().map_err(|_| bad(s))?;
            return Ok(Self::ClippedBall { halfspaces });
        }
        Err(bad(s))
    }

    pub fn describe(&self) -> String {
        match self {
            Self::UnitBall => "unit_ball".into(),
            Self::IidSphereFinite { arms } => format!("finite:{arms}"),
            Self::FixedFinite { arms } => format!("fixed_finite:{arms}"),
            Self::ClippedBall { halfspaces } => format!("clipped_ball:{halfspaces}"),
        }
    }
}

/// One policy to run.
#[derive(Debug, Clone)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    /// Stem of this policy's per-round CSV file.
    pub name: String,
    pub constant_c: f64,
    pub oful_delta: f64,
    /// `None` means the default `sqrt(1/T)`.
    pub argmax_slack: Option<f64>,
    /// Use the smoothed confidence level in finite-set scans too.
    pub smooth_alpha: bool,
}

impl PolicySpec {
    pub fn defaults(kind: PolicyKind) -> Self {
        Self {
            kind,
            name: kind.name().to_string(),
            constant_c: 1.0,
            oful_delta: 0.1,
            argmax_slack: None,
            smooth_alpha: false,
        }
    }
}

/// Diagnostics parameters and thresholds. The thresholds are desk-scale
/// calibration constants, configurable precisely because they are not
/// derived quantities.
#[derive(Debug, Clone)]
pub struct DiagnosticsConfig {
    pub elliptical_trials: u32,
    pub elliptical_horizon: u64,
    pub elliptical_dim: usize,
    pub tail_delta: f64,
    pub tail_reps: u32,
    pub tail_round: u64,
    pub tail_dim: usize,
    pub tail_ratio_limit: f64,
    pub scaling_dims: Vec<usize>,
    pub scaling_horizons: Vec<u64>,
    pub scaling_replications: u32,
    pub scaling_ratio_limit: f64,
    pub scaling_control_min: f64,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            elliptical_trials: 1000,
            elliptical_horizon: 200,
            elliptical_dim: 8,
            tail_delta: 0.05,
            tail_reps: 400,
            tail_round: 500,
            tail_dim: 5,
            tail_ratio_limit: 4.0,
            scaling_dims: vec![2, 5],
            scaling_horizons: vec![1024, 4096, 16384],
            scaling_replications: 20,
            scaling_ratio_limit: 1.5,
            scaling_control_min: 3.0,
        }
    }
}

/// Everything one experiment run needs.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub dim: usize,
    pub horizon: u64,
    pub replications: u32,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    pub env: EnvSpec,
    pub noise: NoiseKind,
    pub theta: ThetaSpec,
    pub policies: Vec<PolicySpec>,
    pub diagnostics: DiagnosticsConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dim: 2,
            horizon: 1024,
            replications: 1,
            seed: 0,
            out_dir: None,
            env: EnvSpec::UnitBall,
            noise: NoiseKind::GaussianUnit,
            theta: ThetaSpec::UniformSphere,
            policies: vec![PolicySpec::defaults(PolicyKind::VclUcb)],
            diagnostics: DiagnosticsConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("dim must be at least 1".into()));
        }
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be at least 1".into()));
        }
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.policies.is_empty() {
            return Err(Error::Config("at least one policy is required".into()));
        }
        // The varying confidence level needs ln T > 0.
        for p in &self.policies {
            if p.kind == PolicyKind::VclUcb && self.horizon < 2 {
                return Err(Error::Config(
                    "policy vcl_ucb requires horizon >= 2".into(),
                ));
            }
            if !p.constant_c.is_finite() || p.constant_c <= 0.0 {
                return Err(Error::Config(format!(
                    "constant_c must be positive in policy `{}`",
                    p.name
                )));
            }
            if p.oful_delta.is_nan() || p.oful_delta <= 0.0 || p.oful_delta >= 1.0 {
                return Err(Error::Config(format!(
                    "oful_delta must be in (0, 1) in policy `{}`",
                    p.name
                )));
            }
            if let Some(s) = p.argmax_slack {
                if !s.is_finite() || s <= 0.0 {
                    return Err(Error::Config(format!(
                        "argmax_slack must be positive in policy `{}`",
                        p.name
                    )));
                }
            }
        }
        if let ThetaSpec::Fixed(v) = &self.theta {
            if v.len() != self.dim {
                return Err(Error::Config(format!(
                    "fixed theta has {} entries but dim = {}",
                    v.len(),
                    self.dim
                )));
            }
        }
        let mut names = HashSet::new();
        for p in &self.policies {
            if !names.insert(p.name.clone()) {
                return Err(Error::Config(format!("duplicate policy name `{}`", p.name)));
            }
        }
        Ok(())
    }

    /// Parses the config text format. See the module docs for the grammar.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig {
            policies: Vec::new(),
            ..Default::default()
        };
        let mut seen_experiment: HashSet<String> = HashSet::new();
        let mut seen_policy: HashSet<String> = HashSet::new();
        let mut current: Option<PolicySpec> = None;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Config(format!("line {}: {}", lineno + 1, msg));
            if line == "[policy]" {
                if let Some(p) = current.take() {
                    cfg.policies.push(p);
                }
                seen_policy.clear();
                current = Some(PolicySpec::defaults(PolicyKind::VclUcb));
                continue;
            }
            if line.starts_with('[') {
                return Err(err(format!("unknown section `{line}`")));
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(err(format!("expected `key = value`, got `{line}`")));
            };
            let key = key.trim();
            let value = value.trim();
            if let Some(policy) = current.as_mut() {
                if !seen_policy.insert(key.to_string()) {
                    return Err(err(format!("duplicate policy key `{key}`")));
                }
                apply_policy_key(policy, key, value).map_err(&err)?;
            } else {
                if !seen_experiment.insert(key.to_string()) {
                    return Err(err(format!("duplicate key `{key}`")));
                }
                apply_experiment_key(&mut cfg, key, value).map_err(err)?;
            }
        }
        if let Some(p) = current.take() {
            cfg.policies.push(p);
        }
        if cfg.policies.is_empty() {
            cfg.policies.push(PolicySpec::defaults(PolicyKind::VclUcb));
        }
        dedupe_names(&mut cfg.policies);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn dedupe_names(policies: &mut [PolicySpec]) {
    let mut seen: HashSet<String> = HashSet::new();
    for p in policies.iter_mut() {
        if !seen.insert(p.name.clone()) {
            let mut i = 2;
            while !seen.insert(format!("{}_{i}", p.name)) {
                i += 1;
            }
            p.name = format!("{}_{i}", p.name);
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
    value
        .parse::<T>()
        .map_err(|_| format!("invalid value `{value}` for key `{key}`"))
}

fn apply_experiment_key(
    cfg: &mut ExperimentConfig,
    key: &str,
    value: &str,
) -> std::result::Result<(), String> {
    let d = &mut cfg.diagnostics;
    match key {
        "dim" => cfg.dim = parse_num(key, value)?,
        "horizon" => cfg.horizon = parse_num(key, value)?,
        "replications" => cfg.replications = parse_num(key, value)?,
        "seed" => cfg.seed = parse_num(key, value)?,
        "out" => cfg.out_dir = Some(PathBuf::from(value)),
        "env" => cfg.env = EnvSpec::parse(value).map_err(|e| e.to_string())?,
        "noise" => {
            cfg.noise = NoiseKind::parse(value)
                .ok_or_else(|| format!("invalid noise `{value}` (gaussian|rademacher|uniform)"))?
        }
        "theta" => cfg.theta = parse_theta(value)?,
        "elliptical_trials" => d.elliptical_trials = parse_num(key, value)?,
        "elliptical_horizon" => d.elliptical_horizon = parse_num(key, value)?,
        "elliptical_dim" => d.elliptical_dim = parse_num(key, value)?,
        "tail_delta" => d.tail_delta = parse_num(key, value)?,
        "tail_reps" => d.tail_reps = parse_num(key, value)?,
        "tail_round" => d.tail_round = parse_num(key, value)?,
        "tail_dim" => d.tail_dim = parse_num(key, value)?,
        "tail_ratio_limit" => d.tail_ratio_limit = parse_num(key, value)?,
        "scaling_dims" => d.scaling_dims = parse_list(key, value)?,
        "scaling_horizons" => d.scaling_horizons = parse_list(key, value)?,
        "scaling_replications" => d.scaling_replications = parse_num(key, value)?,
        "scaling_ratio_limit" => d.scaling_ratio_limit = parse_num(key, value)?,
        "scaling_control_min" => d.scaling_control_min = parse_num(key, value)?,
        _ => return Err(format!("unknown key `{key}`")),
    }
    Ok(())
}

fn apply_policy_key(
    policy: &mut PolicySpec,
    key: &str,
    value: &str,
) -> std::result::Result<(), String> {
    match key {
        "kind" => {
            let kind = PolicyKind::parse(value)
                .ok_or_else(|| format!("invalid policy kind `{value}`"))?;
            // Rename only if the name still tracks the kind.
            if policy.name == policy.kind.name() {
                policy.name = kind.name().to_string();
            }
            policy.kind = kind;
        }
        "name" => policy.name = value.to_string(),
        "constant_c" => policy.constant_c = parse_num(key, value)?,
        "oful_delta" => policy.oful_delta = parse_num(key, value)?,
        "argmax_slack" => {
            policy.argmax_slack = if value == "auto" {
                None
            } else {
                Some(parse_num(key, value)?)
            }
        }
        "alpha_form" => {
            policy.smooth_alpha = match value {
                "max" => false,
                "smooth" => true,
                _ => return Err(format!("invalid alpha_form `{value}` (max|smooth)")),
            }
        }
        _ => return Err(format!("unknown policy key `{key}`")),
    }
    Ok(())
}

fn parse_theta(value: &str) -> std::result::Result<ThetaSpec, String> {
    match value {
        "uniform_sphere" => Ok(ThetaSpec::UniformSphere),
        "uniform_ball" => Ok(ThetaSpec::UniformBall),
        other => {
            let Some(list) = other.strip_prefix("fixed:") else {
                return Err(format!("invalid theta `{other}`"));
            };
            let v = list
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| format!("invalid fixed theta `{other}`"))?;
            Ok(ThetaSpec::Fixed(v))
        }
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<Vec<T>, String> {
    value
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|_| format!("invalid value `{value}` for key `{key}`"))
        })
        .collect()
}
