//! `vclb` — experiment runner and diagnostics CLI.
//!
//! Exit codes: 0 success, 1 config error, 2 diagnostic failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use vclb::config::{EnvSpec, ExperimentConfig, PolicySpec};
use vclb::diagnostics;
use vclb::environment::NoiseKind;
use vclb::experiment::{self, fmt_float};
use vclb::policies::PolicyKind;

#[derive(Parser)]
#[command(name = "vclb", version, about = "Infinite-armed linear bandit simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo experiment and write per-round and summary CSVs.
    Run(RunArgs),
    /// Run one of the built-in diagnostics.
    Diagnose(DiagnoseArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config file (flat key = value format).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV files (overrides the config's `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    replications: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Replace the config's policy list with a single policy of this kind.
    #[arg(long)]
    policy: Option<String>,
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long)]
    dim: Option<usize>,
    /// `unit_ball` | `finite:<k>` | `fixed_finite:<k>` | `clipped_ball:<m>`
    #[arg(long)]
    env: Option<String>,
    /// `gaussian` | `rademacher` | `uniform`
    #[arg(long)]
    noise: Option<String>,
    /// Bonus constant C applied to every policy in the run.
    #[arg(long = "constant-c")]
    constant_c: Option<f64>,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[arg(value_enum)]
    which: Diagnostic,
    /// Optional config file; diagnostics keys override the defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Diagnostic {
    Elliptical,
    Tail,
    Scaling,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => match run(args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Command::Diagnose(args) => match diagnose(args) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(2),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
    }
}

fn load_config(path: &PathBuf) -> vclb::Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    ExperimentConfig::parse(&text)
}

fn run(args: RunArgs) -> vclb::Result<()> {
    let mut config = load_config(&args.config)?;
    if let Some(out) = args.out {
        config.out_dir = Some(out);
    }
    if config.out_dir.is_none() {
        config.out_dir = Some(PathBuf::from("out"));
    }
    if let Some(r) = args.replications {
        config.replications = r;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(t) = args.horizon {
        config.horizon = t;
    }
    if let Some(d) = args.dim {
        config.dim = d;
    }
    if let Some(env) = args.env {
        config.env = EnvSpec::parse(&env)?;
    }
    if let Some(noise) = args.noise {
        config.noise = NoiseKind::parse(&noise)
            .ok_or_else(|| vclb::Error::Config(format!("invalid noise `{noise}`")))?;
    }
    if let Some(kind) = args.policy {
        let kind = PolicyKind::parse(&kind)
            .ok_or_else(|| vclb::Error::Config(format!("invalid policy `{kind}`")))?;
        config.policies = vec![PolicySpec::defaults(kind)];
    }
    if let Some(c) = args.constant_c {
        for p in &mut config.policies {
            p.constant_c = c;
        }
    }
    config.validate()?;

    let result = experiment::run_experiment(&config)?;
    for p in &result.policies {
        let mean = p.final_regrets.iter().sum::<f64>() / p.final_regrets.len() as f64;
        println!(
            "policy {:<10} final regret mean {:.4} median {:.4} normalized {:.4}",
            p.name,
            mean,
            experiment::median(&p.final_regrets),
            p.normalized_median,
        );
        if p.non_converged_rounds > 0 {
            eprintln!(
                "warning: policy {} had {} rounds without an optimizer certificate",
                p.name, p.non_converged_rounds
            );
        }
    }
    for f in &result.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn diagnose(args: DiagnoseArgs) -> vclb::Result<bool> {
    let config = match &args.config {
        Some(path) => load_config(path)?,
        None => ExperimentConfig::default(),
    };
    let d = &config.diagnostics;
    let seed = args.seed.unwrap_or(config.seed);
    match args.which {
        Diagnostic::Elliptical => {
            let report = diagnostics::diagnostic_elliptical(
                d.elliptical_trials,
                d.elliptical_horizon,
                d.elliptical_dim,
                seed,
            )?;
            println!(
                "elliptical: trials {} T {} d {} violations {} max_ratio {}",
                report.trials,
                report.horizon,
                report.dim,
                report.violations,
                fmt_float(report.max_ratio),
            );
            if let Some(s) = report.violating_seed {
                println!("first violating seed: {s}");
            }
            Ok(report.passed())
        }
        Diagnostic::Tail => {
            let report = diagnostics::diagnostic_tail_bound(
                d.tail_delta,
                d.tail_reps,
                d.tail_round,
                d.tail_dim,
                seed,
                d.tail_ratio_limit,
            )?;
            println!(
                "tail: reps {} t {} d {} delta {} quantile {:.4} ratio {:.4} limit {}",
                report.reps,
                report.round,
                report.dim,
                report.delta,
                report.quantile,
                report.ratio,
                report.limit,
            );
            Ok(report.passed())
        }
        Diagnostic::Scaling => {
            let report = diagnostics::scaling_report(
                &d.scaling_dims,
                &d.scaling_horizons,
                d.scaling_replications,
                seed,
                d.scaling_ratio_limit,
                d.scaling_control_min,
            )?;
            for row in &report.vcl {
                println!(
                    "scaling vcl_ucb d {} rho {:?} ratio {:.4} (limit {})",
                    row.dim, row.rho, row.ratio, report.ratio_limit
                );
            }
            for row in &report.control {
                println!(
                    "scaling random  d {} rho {:?} ratio {:.4} (control min {})",
                    row.dim, row.rho, row.ratio, report.control_min
                );
            }
            Ok(report.passed())
        }
    }
}
