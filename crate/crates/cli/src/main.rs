//! `efronci`: robust confidence intervals for the Efron contamination model.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use efronci_core::ci::{ci_known_variance_opts, ci_unknown_variance_opts, CiOptions, CiOutput};
use efronci_core::hard_instances::{
    gaussian_raw_moments, matching_priors_known, prior_moments, two_point_instance_unknown, DiscretePrior,
};
use efronci_core::harness::{
    calibrate_constants, run_experiment, write_csv, write_disk_distance_csv, CalibrationConfig, CalibrationTargets,
    ExperimentConfig,
};
use efronci_core::model::SampleSet;
use efronci_core::pilot::{Mode, PilotConstants};
use efronci_core::Error;
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "efronci", version, about = "Confidence intervals for a contaminated Gaussian location")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Interval for the mean when the noise variance is known.
    CiKnown {
        #[arg(long)]
        sigma2: f64,
        #[command(flatten)]
        common: CiArgs,
    },
    /// Interval for the mean when the noise variance is unknown.
    CiUnknown {
        #[command(flatten)]
        common: CiArgs,
    },
    /// Emit a lower-bound instance with its verified moment table.
    HardInstance {
        #[arg(long, value_enum)]
        mode: InstanceMode,
        #[arg(long)]
        eps_max: f64,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long = "K", default_value_t = 8)]
        k: u32,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a coverage and length sweep and write the results table.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Grid-search the tuning constants against coverage targets.
    Calibrate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Dump the two-disk distance over angles in [0, pi] as CSV.
    DiskGeometry {
        #[arg(long)]
        eps_max: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 181)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(clap::Args)]
struct CiArgs {
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    eps_max: f64,
    /// Whitespace-separated sample values.
    #[arg(long)]
    input: PathBuf,
    /// JSON file of tuning constants; `delta` and `eps_max` come from the flags.
    #[arg(long)]
    constants: Option<PathBuf>,
    /// Write a JSON report with the pilot bundle and certificate margins.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum InstanceMode {
    MatchingKnown,
    TwoPointUnknown,
}

/// Exit code 2 for bad input, 1 for anything that fails later.
enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidParameter { .. } | Error::EmptySample | Error::NonFiniteSample { .. } => {
                Failure::Config(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read_config(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn write_out(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Runtime(e.to_string()))?;
    write_out(path, text.as_bytes())
}

fn load_constants(mode: Mode, args: &CiArgs) -> CliResult<PilotConstants> {
    let base = match &args.constants {
        Some(p) => serde_json::from_str(&read_config(p)?).map_err(|e| Failure::Config(format!("constants: {e}")))?,
        None => PilotConstants::default_for(mode),
    };
    let c = PilotConstants {
        delta: args.delta,
        eps_max: args.eps_max,
        ..base
    };
    c.validate(mode)?;
    Ok(c)
}

fn ci_command(mode: Mode, sigma2: Option<f64>, args: &CiArgs) -> CliResult<()> {
    let constants = load_constants(mode, args)?;
    let samples = SampleSet::read_text(&args.input).map_err(|e| match e {
        Error::Io(m) => Failure::Config(format!("{}: {m}", args.input.display())),
        other => other.into(),
    })?;
    let opts = CiOptions {
        record_reports: args.report.is_some(),
        ..CiOptions::default()
    };
    let out: CiOutput = match (mode, sigma2) {
        (Mode::Known, Some(s2)) => ci_known_variance_opts(&samples, s2, &constants, &opts)?,
        (Mode::Known, None) => return Err(Failure::Config("known-variance mode needs --sigma2".into())),
        (Mode::Unknown, _) => ci_unknown_variance_opts(&samples, &constants, &opts)?,
    };
    if out.interval.empty {
        println!("empty");
    } else {
        println!("[{}, {}]", out.interval.lower, out.interval.upper);
    }
    if let Some(path) = &args.report {
        write_json(
            path,
            &json!({
                "mode": out.mode,
                "n": samples.len(),
                "constants": constants,
                "interval": out.interval,
                "contiguous": out.contiguous,
                "pilot": out.pilot,
                "pivots": out.pivots.len(),
                "accepted_candidates": out.accepted_candidates,
                "reports": out.reports,
            }),
        )?;
    }
    Ok(())
}

fn moment_table(a: &[f64], b: &[f64]) -> Vec<serde_json::Value> {
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(k, (x, y))| {
            let rel = (x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE);
            json!({"k": k, "first": x, "second": y, "relative_difference": rel})
        })
        .collect()
}

fn atoms_json(p: &DiscretePrior) -> Vec<serde_json::Value> {
    p.atoms.iter().map(|&(x, w)| json!({"location": x, "weight": w})).collect()
}

fn hard_instance(
    mode: InstanceMode,
    eps_max: f64,
    eps: Option<f64>,
    k: u32,
    tau: Option<f64>,
    out: &Path,
) -> CliResult<()> {
    let value = match mode {
        InstanceMode::MatchingKnown => {
            let eps = eps.ok_or_else(|| Failure::Config("--eps is required for matching-known".into()))?;
            let tau = tau.unwrap_or(std::f64::consts::E * f64::from(k).sqrt());
            let (nu0, nu1) = matching_priors_known(eps_max, eps, k, tau)?;
            let kmax = k as usize + 1;
            let table = moment_table(&prior_moments(&nu0, kmax), &prior_moments(&nu1, kmax));
            let verified = table
                .iter()
                .all(|r| r["relative_difference"].as_f64().is_some_and(|d| d <= 1e-8));
            json!({
                "mode": "matching_known",
                "eps_max": eps_max, "eps": eps, "K": k, "tau": tau,
                "nu0": atoms_json(&nu0),
                "nu1": atoms_json(&nu1),
                "moments": table,
                "verified": verified,
            })
        }
        InstanceMode::TwoPointUnknown => {
            let inst = two_point_instance_unknown(eps_max)?;
            let g = gaussian_raw_moments(inst.gaussian_mean, inst.gaussian_var, 4);
            let m = prior_moments(&inst.mu0, 4);
            let table = moment_table(&m, &g);
            let verified = (0..=3).all(|k| (m[k] - g[k]).abs() <= 1e-10 * m[k].abs().max(1.0));
            json!({
                "mode": "two_point_unknown",
                "eps_max": eps_max,
                "mu0": atoms_json(&inst.mu0),
                "gaussian": {"mean": inst.gaussian_mean, "variance": inst.gaussian_var},
                "p": inst.p, "a": inst.a,
                "moments": table,
                "verified": verified,
            })
        }
    };
    write_json(out, &value)
}

fn simulate(config: &Path, out: &Path) -> CliResult<()> {
    let cfg = ExperimentConfig::from_json(&read_config(config)?)?;
    let rows = run_experiment(&cfg)?;
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf)?;
    write_out(out, &buf)
}

fn calibrate(config: &Path, out: &Path) -> CliResult<()> {
    let cfg: CalibrationConfig =
        serde_json::from_str(&read_config(config)?).map_err(|e| Failure::Config(format!("calibration config: {e}")))?;
    cfg.experiment.validate()?;
    let targets = cfg
        .targets
        .unwrap_or_else(|| CalibrationTargets::from_delta(cfg.experiment.delta));
    let result = calibrate_constants(&cfg.experiment, &cfg.grid, targets)?;
    eprintln!(
        "pilot coverage {:.3}, coverage {:.3}, median length {:.4} over {} grid points",
        result.pilot_coverage, result.coverage, result.median_length, result.evaluated
    );
    write_json(out, &result.constants)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::CiKnown { sigma2, common } => {
            if !(sigma2 > 0.0 && sigma2.is_finite()) {
                return Err(Failure::Config("--sigma2 must be positive".into()));
            }
            ci_command(Mode::Known, Some(sigma2), &common)
        }
        Command::CiUnknown { common } => ci_command(Mode::Unknown, None, &common),
        Command::HardInstance {
            mode,
            eps_max,
            eps,
            k,
            tau,
            out,
        } => hard_instance(mode, eps_max, eps, k, tau, &out),
        Command::Simulate { config, out } => simulate(&config, &out),
        Command::Calibrate { config, out } => calibrate(&config, &out),
        Command::DiskGeometry {
            eps_max,
            eps,
            points,
            out,
        } => {
            let mut buf = Vec::new();
            write_disk_distance_csv(eps_max, eps, points, &mut buf)?;
            write_out(&out, &buf)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::FAILURE
        }
    }
}
