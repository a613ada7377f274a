//! Monte-Carlo sweeps: coverage and length tables, rate slopes, constant
//! calibration, and the hard-instance indistinguishability probe.
//!
//! Each trial draws from its own ChaCha stream addressed by
//! `(master_seed, cell, trial)`, so tables are reproducible regardless of how
//! rayon schedules the work.

use std::io::Write;
use std::time::Instant;

use log::warn;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificates::disk_distance;
use crate::ci::{run_ci, CiOutput};
use crate::ecf::log_en;
use crate::error::{Error, Result};
use crate::hard_instances::{matching_priors_known, Prior};
use crate::model::{AdversaryDistribution, EfronModel, SampleSet};
use crate::pilot::{Mode, PilotConstants};
use crate::rng::{trial_stream, SeedProvenance};

pub const CSV_HEADER: [&str; 11] = [
    "mode",
    "n",
    "eps",
    "adversary",
    "trials",
    "coverage",
    "mc_stderr",
    "mean_length",
    "median_length",
    "empty_rate",
    "wallclock_s",
];

/// An adversary as written in an experiment config. Some variants depend on
/// the cell (`n`, `eps`), so they are resolved per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AdversarySpec {
    /// Atom at `theta + location * sigma`.
    PointMass { location: f64 },
    /// Atom at `theta + scale * sigma / sqrt(log(e n))`.
    NearPointMass { scale: f64 },
    /// Atoms `(offset, weight)` at `theta + offset * sigma`.
    Discrete { atoms: Vec<(f64, f64)> },
    /// Components `(offset, variance, weight)` in units of `sigma`.
    GaussianMixture { components: Vec<(f64, f64, f64)> },
    /// The alternative prior of the known-variance moment-matching pair.
    MatchingPrior { k: u32 },
}

impl AdversarySpec {
    pub fn label(&self) -> String {
        match self {
            Self::PointMass { location } => format!("point_mass({location})"),
            Self::NearPointMass { scale } => format!("near_point_mass({scale})"),
            Self::Discrete { atoms } => format!("discrete({})", atoms.len()),
            Self::GaussianMixture { components } => format!("gaussian_mixture({})", components.len()),
            Self::MatchingPrior { k } => format!("matching_prior({k})"),
        }
    }

    pub fn resolve(&self, n: usize, eps: f64, eps_max: f64, theta: f64, sigma2: f64) -> Result<AdversaryDistribution> {
        let sd = sigma2.sqrt();
        match self {
            Self::PointMass { location } => AdversaryDistribution::point_mass(theta + location * sd),
            Self::NearPointMass { scale } => AdversaryDistribution::point_mass(theta + scale * sd / log_en(n).sqrt()),
            Self::Discrete { atoms } => {
                AdversaryDistribution::discrete(atoms.iter().map(|&(x, w)| (theta + x * sd, w)).collect())
            }
            Self::GaussianMixture { components } => AdversaryDistribution::gaussian_mixture(
                components
                    .iter()
                    .map(|&(m, v, w)| (theta + m * sd, v * sigma2, w))
                    .collect(),
            ),
            Self::MatchingPrior { k } => {
                let e = if eps > 0.0 { eps } else { eps_max };
                let tau = std::f64::consts::E * f64::from(*k).sqrt();
                let (_, nu1) = matching_priors_known(eps_max, e.min(eps_max), *k, tau)?;
                AdversaryDistribution::discrete(nu1.atoms.iter().map(|&(x, w)| (theta + x * sd, w)).collect())
            }
        }
    }
}

/// Far point mass, near point mass, a two-component mixture, and the
/// moment-matching alternative prior.
pub fn default_stress_adversaries() -> Vec<AdversarySpec> {
    vec![
        AdversarySpec::PointMass { location: 50.0 },
        AdversarySpec::NearPointMass { scale: 1.0 },
        AdversarySpec::GaussianMixture {
            components: vec![(1.5, 1.0, 0.5), (-3.0, 0.5, 0.5)],
        },
        AdversarySpec::MatchingPrior { k: 8 },
    ]
}

fn default_theta() -> f64 {
    0.0
}

fn default_sigma2() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(alias = "mode")]
    pub modes: Vec<Mode>,
    pub n_list: Vec<usize>,
    pub eps_list: Vec<f64>,
    pub adversaries: Vec<AdversarySpec>,
    pub trials: usize,
    pub delta: f64,
    pub eps_max: f64,
    /// Shared by all modes when present; otherwise each mode's defaults.
    #[serde(default)]
    pub constants: Option<PilotConstants>,
    pub master_seed: u64,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default = "default_sigma2")]
    pub sigma2: f64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.modes.is_empty() || self.n_list.is_empty() || self.eps_list.is_empty() || self.adversaries.is_empty() {
            return Err(Error::Config("modes, n_list, eps_list and adversaries must be nonempty".into()));
        }
        if let Some(&e) = self.eps_list.iter().find(|&&e| !(0.0..=self.eps_max).contains(&e)) {
            return Err(Error::Config(format!("eps {e} outside [0, eps_max = {}]", self.eps_max)));
        }
        if !(self.sigma2 > 0.0) {
            return Err(Error::Config("sigma2 must be positive".into()));
        }
        for &m in &self.modes {
            self.constants_for(m).validate(m)?;
        }
        Ok(())
    }

    /// Constants for `mode` with this config's `delta` and `eps_max`.
    pub fn constants_for(&self, mode: Mode) -> PilotConstants {
        let base = self.constants.unwrap_or_else(|| PilotConstants::default_for(mode));
        PilotConstants {
            delta: self.delta,
            eps_max: self.eps_max,
            ..base
        }
    }

    /// Cells in sweep order: mode, then n, then eps, then adversary.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &mode in &self.modes {
            for &n in &self.n_list {
                for &eps in &self.eps_list {
                    for adversary in &self.adversaries {
                        out.push(Cell {
                            index: out.len() as u64,
                            mode,
                            n,
                            eps,
                            adversary: adversary.clone(),
                        });
                    }
                }
            }
        }
        out
    }

    pub fn model(&self, cell: &Cell) -> Result<EfronModel> {
        let q = cell
            .adversary
            .resolve(cell.n, cell.eps, self.eps_max, self.theta, self.sigma2)?;
        EfronModel::new(self.theta, self.sigma2, cell.eps, q)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub index: u64,
    pub mode: Mode,
    pub n: usize,
    pub eps: f64,
    pub adversary: AdversarySpec,
}

/// What a single replication produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub covered: bool,
    pub pilot_covered: bool,
    pub empty: bool,
    pub failed: bool,
    pub length: f64,
}

impl TrialOutcome {
    fn failure() -> Self {
        Self {
            covered: false,
            pilot_covered: false,
            empty: false,
            failed: true,
            length: f64::NAN,
        }
    }

    fn from_output(out: &CiOutput, theta: f64, sigma2: f64) -> Self {
        let p = &out.pilot;
        let variance_ok = match out.mode {
            Mode::Known => true,
            Mode::Unknown => p.sigma2_minus <= sigma2 && sigma2 <= p.sigma2_plus,
        };
        Self {
            covered: out.interval.contains(theta),
            pilot_covered: p.pilot_interval.contains(theta) && variance_ok,
            empty: out.interval.empty,
            failed: false,
            length: out.interval.length(),
        }
    }
}

/// One row of the results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub mode: Mode,
    pub n: usize,
    pub eps: f64,
    pub adversary: String,
    pub trials: usize,
    pub coverage: f64,
    pub mc_stderr: f64,
    pub mean_length: f64,
    pub median_length: f64,
    pub empty_rate: f64,
    pub wallclock_s: f64,
    pub pilot_coverage: f64,
    pub failures: usize,
}

pub fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn summarize(outcomes: &[TrialOutcome]) -> (f64, f64, f64, f64, f64, usize) {
    let t = outcomes.len() as f64;
    let cov = outcomes.iter().filter(|o| o.covered).count() as f64 / t;
    let pilot = outcomes.iter().filter(|o| o.pilot_covered).count() as f64 / t;
    let empty = outcomes.iter().filter(|o| o.empty).count() as f64 / t;
    let failures = outcomes.iter().filter(|o| o.failed).count();
    let mut lengths: Vec<f64> = outcomes
        .iter()
        .filter(|o| !o.empty && !o.failed)
        .map(|o| o.length)
        .collect();
    let mean = if lengths.is_empty() {
        f64::NAN
    } else {
        lengths.iter().sum::<f64>() / lengths.len() as f64
    };
    let med = median(&mut lengths);
    (cov, pilot, empty, mean, med, failures)
}

/// Runs every trial of one cell with the given constants.
pub fn run_cell(config: &ExperimentConfig, cell: &Cell, constants: &PilotConstants) -> Result<Vec<TrialOutcome>> {
    let model = config.model(cell)?;
    let sigma2 = config.sigma2;
    let theta = config.theta;
    Ok((0..config.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let seed = trial_stream(config.master_seed, cell.index, trial);
            let samples = model.sample(cell.n, seed);
            match run_ci(&samples, cell.mode, Some(sigma2), constants) {
                Ok(out) => TrialOutcome::from_output(&out, theta, sigma2),
                Err(e) => {
                    warn!("cell {} trial {trial}: {e}", cell.index);
                    TrialOutcome::failure()
                }
            }
        })
        .collect())
}

/// Coverage and length table for every cell of `config`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    config.validate()?;
    config
        .cells()
        .iter()
        .map(|cell| {
            let start = Instant::now();
            let outcomes = run_cell(config, cell, &config.constants_for(cell.mode))?;
            let (cov, pilot, empty, mean, med, failures) = summarize(&outcomes);
            Ok(ExperimentRow {
                mode: cell.mode,
                n: cell.n,
                eps: cell.eps,
                adversary: cell.adversary.label(),
                trials: config.trials,
                coverage: cov,
                mc_stderr: (cov * (1.0 - cov) / config.trials as f64).sqrt(),
                mean_length: mean,
                median_length: med,
                empty_rate: empty,
                wallclock_s: start.elapsed().as_secs_f64(),
                pilot_coverage: pilot,
                failures,
            })
        })
        .collect()
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Known => "known",
        Mode::Unknown => "unknown",
    }
}

/// Writes the results table with the fixed header.
pub fn write_csv<W: Write>(rows: &[ExperimentRow], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Io(e.to_string());
    wr.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        wr.write_record([
            mode_name(r.mode).to_string(),
            r.n.to_string(),
            r.eps.to_string(),
            r.adversary.clone(),
            r.trials.to_string(),
            r.coverage.to_string(),
            r.mc_stderr.to_string(),
            r.mean_length.to_string(),
            r.median_length.to_string(),
            r.empty_rate.to_string(),
            r.wallclock_s.to_string(),
        ])
        .map_err(io)?;
    }
    wr.flush()?;
    Ok(())
}

/// Ordinary least squares of `log y` on `log x`: `(slope, standard error)`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let resid: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum();
    let se = if k > 2.0 { (resid / (k - 2.0) / sxx).sqrt() } else { f64::NAN };
    (slope, se)
}

/// Coverage levels a calibrated constant set must reach in every cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTargets {
    pub pilot_coverage: f64,
    pub coverage: f64,
}

impl CalibrationTargets {
    pub fn from_delta(delta: f64) -> Self {
        Self {
            pilot_coverage: 1.0 - delta / 2.0,
            coverage: 1.0 - delta,
        }
    }
}

/// Candidate values searched by [`calibrate_constants`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationGrid {
    #[serde(rename = "M")]
    pub m: Vec<f64>,
    #[serde(rename = "L")]
    pub l: Vec<f64>,
    /// Multiples (at least 1) of the smallest admissible `kappa`.
    pub kappa_multiplier: Vec<f64>,
    pub c0: Vec<f64>,
}

impl Default for CalibrationGrid {
    fn default() -> Self {
        Self {
            m: vec![0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0],
            l: vec![2.0, 4.0],
            kappa_multiplier: vec![1.0],
            c0: vec![0.25],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub constants: PilotConstants,
    pub pilot_coverage: f64,
    pub coverage: f64,
    pub median_length: f64,
    pub evaluated: usize,
}

/// Calibration config file: a sweep plus the search grid and targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    pub experiment: ExperimentConfig,
    #[serde(default)]
    pub grid: CalibrationGrid,
    #[serde(default)]
    pub targets: Option<CalibrationTargets>,
}

struct Evaluation {
    constants: PilotConstants,
    pilot_coverage: f64,
    coverage: f64,
    median_length: f64,
}

fn evaluate(config: &ExperimentConfig, cells: &[Cell], constants: PilotConstants) -> Result<Evaluation> {
    let mut pilot_min: f64 = 1.0;
    let mut cov_min: f64 = 1.0;
    let mut lengths = Vec::new();
    for cell in cells {
        let out = run_cell(config, cell, &constants)?;
        let (cov, pilot, ..) = summarize(&out);
        pilot_min = pilot_min.min(pilot);
        cov_min = cov_min.min(cov);
        lengths.extend(out.iter().filter(|o| !o.empty && !o.failed).map(|o| o.length));
    }
    Ok(Evaluation {
        constants,
        pilot_coverage: pilot_min,
        coverage: cov_min,
        median_length: median(&mut lengths),
    })
}

/// Finds the smallest `M` on the grid for which some `(L, kappa, c0)` meets
/// both coverage targets in every cell of the first configured mode, and among
/// those returns the one with the smallest pooled median length.
pub fn calibrate_constants(
    config: &ExperimentConfig,
    grid: &CalibrationGrid,
    targets: CalibrationTargets,
) -> Result<CalibrationResult> {
    config.validate()?;
    let mode = config.modes[0];
    let cells: Vec<Cell> = config.cells().into_iter().filter(|c| c.mode == mode).collect();
    let base = config.constants_for(mode);
    let mut ms = grid.m.clone();
    ms.sort_by(f64::total_cmp);
    let mut evaluated = 0;
    for &m in &ms {
        let mut best: Option<Evaluation> = None;
        for &l in &grid.l {
            for &mult in &grid.kappa_multiplier {
                if mult < 1.0 {
                    return Err(Error::Config("kappa multipliers must be at least 1".into()));
                }
                for &c0 in &grid.c0 {
                    let constants = PilotConstants {
                        m,
                        l,
                        c0,
                        kappa: mult * PilotConstants::min_kappa(mode, m),
                        ..base
                    };
                    constants.validate(mode)?;
                    let ev = evaluate(config, &cells, constants)?;
                    evaluated += 1;
                    let feasible = ev.pilot_coverage >= targets.pilot_coverage && ev.coverage >= targets.coverage;
                    if feasible && best.as_ref().map_or(true, |b| ev.median_length < b.median_length) {
                        best = Some(ev);
                    }
                }
            }
        }
        if let Some(b) = best {
            return Ok(CalibrationResult {
                constants: b.constants,
                pilot_coverage: b.pilot_coverage,
                coverage: b.coverage,
                median_length: b.median_length,
                evaluated,
            });
        }
    }
    Err(Error::Infeasible(format!(
        "no grid point reaches pilot coverage {} and coverage {}",
        targets.pilot_coverage, targets.coverage
    )))
}

/// `n` draws of `eta + sqrt(sigma2) Z` with `eta` from `prior`.
pub fn sample_location_mixture(prior: &Prior, sigma2: f64, n: usize, seed: SeedProvenance) -> SampleSet {
    let mut rng = seed.rng();
    let sd = sigma2.sqrt();
    let values = (0..n)
        .map(|_| {
            let eta = match prior {
                Prior::Discrete(p) => {
                    let u: f64 = rng.gen();
                    let mut acc = 0.0;
                    let mut loc = p.atoms.last().map_or(0.0, |a| a.0);
                    for &(x, w) in &p.atoms {
                        acc += w;
                        if u < acc {
                            loc = x;
                            break;
                        }
                    }
                    loc
                }
                Prior::Gaussian { mean, variance } => {
                    let z: f64 = rng.sample(StandardNormal);
                    mean + variance.sqrt() * z
                }
            };
            let z: f64 = rng.sample(StandardNormal);
            eta + sd * z
        })
        .collect();
    SampleSet::new(values, seed).expect("finite draws")
}

/// Error rates of the test `1{0 not in CI}` between two location mixtures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub type_one: f64,
    pub type_two: f64,
    pub error_sum: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn indistinguishability_probe(
    null: &Prior,
    alternative: &Prior,
    sigma2: f64,
    n: usize,
    trials: usize,
    mode: Mode,
    constants: &PilotConstants,
    master_seed: u64,
) -> Result<ProbeResult> {
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let rejects = |prior: &Prior, cell: u64| -> usize {
        (0..trials as u64)
            .into_par_iter()
            .filter(|&trial| {
                let s = sample_location_mixture(prior, sigma2, n, trial_stream(master_seed, cell, trial));
                match run_ci(&s, mode, Some(sigma2), constants) {
                    Ok(out) => !out.interval.contains(0.0),
                    Err(_) => true,
                }
            })
            .count()
    };
    let t = trials as f64;
    let type_one = rejects(null, 0) as f64 / t;
    let type_two = 1.0 - rejects(alternative, 1) as f64 / t;
    Ok(ProbeResult {
        type_one,
        type_two,
        error_sum: type_one + type_two,
    })
}

/// `(angle, disk_distance)` over `points` equally spaced angles in `[0, pi]`.
pub fn disk_distance_sweep(eps_max: f64, eps: f64, points: usize) -> Vec<(f64, f64)> {
    let steps = points.max(2) - 1;
    (0..=steps)
        .map(|i| {
            let angle = std::f64::consts::PI * i as f64 / steps as f64;
            (angle, disk_distance(eps_max, eps, angle))
        })
        .collect()
}

/// Writes a sweep as `eps_max,eps,angle,distance` rows with full precision.
pub fn write_disk_distance_csv<W: Write>(eps_max: f64, eps: f64, points: usize, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Io(e.to_string());
    wr.write_record(["eps_max", "eps", "angle", "distance"]).map_err(io)?;
    for (angle, d) in disk_distance_sweep(eps_max, eps, points) {
        wr.write_record([eps_max.to_string(), eps.to_string(), angle.to_string(), d.to_string()])
            .map_err(io)?;
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig::from_json(
            r#"{"modes":["known"],"n_list":[256,512],"eps_list":[0.0,0.1],
                "adversaries":[{"type":"point_mass","location":50.0},{"type":"near_point_mass","scale":1.0}],
                "trials":8,"delta":0.1,"eps_max":0.2,"master_seed":5}"#,
        )
        .unwrap()
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [256.0, 1024.0, 4096.0, 16384.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-0.25)).collect();
        let (s, se) = loglog_slope(&xs, &ys);
        assert_abs_diff_eq!(s, -0.25, epsilon = 1e-12);
        assert!(se < 1e-10);
    }

    #[test]
    fn disk_sweep_round_trips() {
        let mut buf = Vec::new();
        write_disk_distance_csv(0.2, 0.05, 33, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows: Vec<&str> = text.lines().skip(1).collect();
        assert_eq!(rows.len(), 33);
        for (row, (angle, d)) in rows.iter().zip(disk_distance_sweep(0.2, 0.05, 33)) {
            let f: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
            assert_eq!(f[2], angle);
            assert_eq!(f[3], d);
        }
    }

    #[test]
    fn median_convention() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 3.0, 2.0]), 2.5);
        assert!(median(&mut []).is_nan());
    }

    #[test]
    fn row_count_and_determinism() {
        let c = small_config();
        let a = run_experiment(&c).unwrap();
        assert_eq!(a.len(), 8);
        let b = run_experiment(&c).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!((x.coverage, x.mean_length, x.median_length, x.empty_rate), (y.coverage, y.mean_length, y.median_length, y.empty_rate));
            assert_abs_diff_eq!(x.mc_stderr, (x.coverage * (1.0 - x.coverage) / 8.0).sqrt(), epsilon = 1e-15);
        }
        let mut buf = Vec::new();
        write_csv(&a, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(text.lines().count(), 9);
    }

    #[test]
    fn config_rejects_eps_above_max() {
        let err = ExperimentConfig::from_json(
            r#"{"modes":["known"],"n_list":[256],"eps_list":[0.3],
                "adversaries":[{"type":"point_mass","location":5.0}],
                "trials":1,"delta":0.1,"eps_max":0.2,"master_seed":1}"#,
        );
        assert!(matches!(err, Err(Error::Config(_))));
    }
}
