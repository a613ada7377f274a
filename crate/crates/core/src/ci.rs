//! The two interval procedures.
//!
//! Both scan a finite set of pivots across the pilot interval, certify each
//! pivot against the characteristic-function constraints, and report the
//! accepted pivots' hull widened by one pivot step on each side. Known
//! variance uses order-1 certificates at `sigma2`; unknown variance accepts a
//! pivot when some variance candidate passes order-1 and order-2 at every
//! frequency.

use log::warn;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificates::{
    order1_certificate, order2_certificate, slack_known, slack_unknown, upsilon_known, upsilon_unknown,
    CertificateMargins, CertificateReport,
};
use crate::ecf::{log_en, EmpiricalCf};
use crate::error::{Error, Result};
use crate::model::{CharacteristicFunction, SampleSet};
use crate::pilot::{pilot_bundle_known, pilot_bundle_unknown, Mode, PilotBundle, PilotConstants};

/// A closed interval, possibly empty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
    pub empty: bool,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Self {
        debug_assert!(lower <= upper);
        Self {
            lower,
            upper,
            empty: false,
        }
    }

    pub fn empty() -> Self {
        Self {
            lower: f64::NAN,
            upper: f64::NAN,
            empty: true,
        }
    }

    pub fn length(&self) -> f64 {
        if self.empty {
            0.0
        } else {
            self.upper - self.lower
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        !self.empty && self.lower <= x && x <= self.upper
    }
}

/// How slack enters the certificates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SlackMode {
    /// The finite-sample slack terms.
    Finite,
    /// No slack beyond a `1e-12` rounding floor; meant for exact population
    /// characteristic functions.
    Zero,
    /// Finite-sample slack multiplied by a nonnegative factor.
    Scaled(f64),
}

/// Absolute tolerance standing in for slack when certificates use exact CFs.
pub const ROUNDING_FLOOR: f64 = 1e-12;

impl SlackMode {
    fn apply(&self, slack: f64) -> f64 {
        match self {
            SlackMode::Finite => slack,
            SlackMode::Zero => ROUNDING_FLOOR,
            SlackMode::Scaled(s) => s * slack,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CiOptions {
    pub slack: SlackMode,
    pub record_reports: bool,
}

impl Default for CiOptions {
    fn default() -> Self {
        Self {
            slack: SlackMode::Finite,
            record_reports: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CiOutput {
    pub interval: Interval,
    pub pilot: PilotBundle,
    pub reports: Vec<CertificateReport>,
    pub accepted_candidates: Vec<f64>,
    pub pivots: Vec<f64>,
    pub contiguous: bool,
    pub mode: Mode,
}

/// Per-frequency data shared by every pivot.
struct Certifier {
    mode: Mode,
    ts: Vec<f64>,
    phi_t: Vec<Complex64>,
    phi_2t: Vec<Complex64>,
    slack1: Vec<f64>,
    slack2: Vec<f64>,
    lambdas: Vec<f64>,
}

impl Certifier {
    fn new<C: CharacteristicFunction + ?Sized>(
        cf: &C,
        bundle: &PilotBundle,
        mode: Mode,
        constants: &PilotConstants,
        slack: SlackMode,
    ) -> Result<Self> {
        let ts = bundle.freq_grid.frequencies();
        let phi_t: Vec<Complex64> = ts.iter().map(|&t| cf.cf(t)).collect();
        let n = bundle.n;
        let (phi_2t, slack1, slack2) = match mode {
            Mode::Known => {
                let s2 = bundle.sigma2_tilde;
                let s1 = ts
                    .iter()
                    .map(|&t| slack_known(t, s2, constants.kappa, n, constants.delta).map(|d| slack.apply(d)))
                    .collect::<Result<Vec<_>>>()?;
                (Vec::new(), s1, Vec::new())
            }
            Mode::Unknown => {
                let p2 = ts.iter().map(|&t| cf.cf(2.0 * t)).collect();
                let mut s1 = Vec::with_capacity(ts.len());
                let mut s2 = Vec::with_capacity(ts.len());
                for &t in &ts {
                    let (d1, d2) = slack_unknown(t, bundle.sigma2_plus, constants.kappa, n, constants.delta)?;
                    s1.push(slack.apply(d1));
                    s2.push(slack.apply(d2));
                }
                (p2, s1, s2)
            }
        };
        Ok(Self {
            mode,
            ts,
            phi_t,
            phi_2t,
            slack1,
            slack2,
            lambdas: bundle.variance_grid.clone(),
        })
    }

    fn certify(&self, mu: f64) -> Result<CertificateReport> {
        let mut entries = Vec::new();
        match self.mode {
            Mode::Known => {
                let s2 = self.lambdas[0];
                for (i, &t) in self.ts.iter().enumerate() {
                    let u = upsilon_known(self.phi_t[i], t, mu, s2)?;
                    let m = order1_certificate(u, self.slack1[i]);
                    let row = CertificateMargins::new(t, s2, m.margin, None);
                    let passed = row.passed;
                    entries.push(row);
                    if !passed {
                        return Ok(CertificateReport {
                            mu,
                            entries,
                            accepted: false,
                        });
                    }
                }
                Ok(CertificateReport {
                    mu,
                    entries,
                    accepted: true,
                })
            }
            Mode::Unknown => {
                for &lam in &self.lambdas {
                    let mut all = true;
                    for (i, &t) in self.ts.iter().enumerate() {
                        let u1 = upsilon_unknown(self.phi_t[i], t, mu, lam)?;
                        let u2 = upsilon_unknown(self.phi_2t[i], 2.0 * t, mu, lam)?;
                        let m1 = order1_certificate(u1, self.slack1[i]);
                        let m2 = order2_certificate(u1, u2, self.slack2[i]);
                        let row = CertificateMargins::new(t, lam, m1.margin, Some(m2.margin));
                        let passed = row.passed;
                        entries.push(row);
                        if !passed {
                            all = false;
                            break;
                        }
                    }
                    if all {
                        return Ok(CertificateReport {
                            mu,
                            entries,
                            accepted: true,
                        });
                    }
                }
                Ok(CertificateReport {
                    mu,
                    entries,
                    accepted: false,
                })
            }
        }
    }
}

/// Certificate report for a single candidate `mu`.
pub fn certify_candidate<C: CharacteristicFunction + ?Sized>(
    mu: f64,
    cf: &C,
    bundle: &PilotBundle,
    mode: Mode,
    constants: &PilotConstants,
    slack: SlackMode,
) -> Result<CertificateReport> {
    Certifier::new(cf, bundle, mode, constants, slack)?.certify(mu)
}

/// `J + 1` equispaced pivots spanning `interval`.
fn pivots(interval: &Interval, pieces: usize) -> Vec<f64> {
    let (lo, hi) = (interval.lower, interval.upper);
    (0..=pieces)
        .map(|j| if j == pieces { hi } else { lo + (hi - lo) * j as f64 / pieces as f64 })
        .collect()
}

fn scan<C: CharacteristicFunction + ?Sized>(
    cf: &C,
    bundle: PilotBundle,
    mode: Mode,
    constants: &PilotConstants,
    pieces: usize,
    opts: &CiOptions,
) -> Result<CiOutput> {
    let certifier = Certifier::new(cf, &bundle, mode, constants, opts.slack)?;
    let grid = pivots(&bundle.pilot_interval, pieces);
    let reports = grid
        .par_iter()
        .map(|&mu| certifier.certify(mu))
        .collect::<Result<Vec<_>>>()?;
    let accepted: Vec<usize> = reports
        .iter()
        .enumerate()
        .filter(|(_, r)| r.accepted)
        .map(|(i, _)| i)
        .collect();
    let (interval, contiguous) = match (accepted.first(), accepted.last()) {
        (Some(&jl), Some(&jr)) => {
            let contiguous = accepted.len() == jr - jl + 1;
            if !contiguous {
                warn!(
                    "accepted pivots are not contiguous: {} of {} between indices {jl} and {jr}",
                    accepted.len(),
                    jr - jl + 1
                );
            }
            (
                Interval::new(grid[jl.saturating_sub(1)], grid[(jr + 1).min(pieces)]),
                contiguous,
            )
        }
        _ => (Interval::empty(), true),
    };
    Ok(CiOutput {
        interval,
        accepted_candidates: accepted.iter().map(|&i| grid[i]).collect(),
        reports: if opts.record_reports { reports } else { Vec::new() },
        pivots: grid,
        pilot: bundle,
        contiguous,
        mode,
    })
}

/// Number of pieces `ceil(n^{1/4} / sqrt(log(e n)))` for the known-variance scan.
pub fn known_pieces(n: usize) -> usize {
    ((n as f64).powf(0.25) / log_en(n).sqrt()).ceil().max(1.0) as usize
}

/// Number of pieces so that adjacent pivots are at most `sigma_plus n^{-1/8}` apart.
pub fn unknown_pieces(interval: &Interval, sigma2_plus: f64, n: usize) -> usize {
    let step = sigma2_plus.sqrt() * (n as f64).powf(-0.125);
    ((interval.upper - interval.lower) / step).ceil().max(1.0) as usize
}

/// Known-variance interval with a caller-chosen characteristic function for
/// the certificates (the pilot always uses `samples`).
pub fn ci_known_variance_with<C: CharacteristicFunction + ?Sized>(
    samples: &SampleSet,
    sigma2: f64,
    constants: &PilotConstants,
    cf: &C,
    opts: &CiOptions,
) -> Result<CiOutput> {
    let bundle = pilot_bundle_known(samples, sigma2, constants)?;
    let pieces = known_pieces(samples.len());
    scan(cf, bundle, Mode::Known, constants, pieces, opts)
}

pub fn ci_known_variance(samples: &SampleSet, sigma2: f64, constants: &PilotConstants) -> Result<CiOutput> {
    ci_known_variance_opts(samples, sigma2, constants, &CiOptions::default())
}

pub fn ci_known_variance_opts(
    samples: &SampleSet,
    sigma2: f64,
    constants: &PilotConstants,
    opts: &CiOptions,
) -> Result<CiOutput> {
    ci_known_variance_with(samples, sigma2, constants, &EmpiricalCf::new(samples), opts)
}

/// Unknown-variance interval. The pilot reads only the first half of
/// `samples`; `cf` (if given) replaces the second half's empirical CF.
pub fn ci_unknown_variance_with<C: CharacteristicFunction + ?Sized>(
    samples: &SampleSet,
    constants: &PilotConstants,
    cf: Option<&C>,
    opts: &CiOptions,
) -> Result<CiOutput> {
    let (holdout, train) = samples.split_half()?;
    let bundle = pilot_bundle_unknown(&holdout, samples.len(), constants)?;
    let pieces = unknown_pieces(&bundle.pilot_interval, bundle.sigma2_plus, samples.len());
    match cf {
        Some(cf) => scan(cf, bundle, Mode::Unknown, constants, pieces, opts),
        None => scan(&EmpiricalCf::new(&train.0), bundle, Mode::Unknown, constants, pieces, opts),
    }
}

pub fn ci_unknown_variance(samples: &SampleSet, constants: &PilotConstants) -> Result<CiOutput> {
    ci_unknown_variance_opts(samples, constants, &CiOptions::default())
}

pub fn ci_unknown_variance_opts(samples: &SampleSet, constants: &PilotConstants, opts: &CiOptions) -> Result<CiOutput> {
    ci_unknown_variance_with::<EmpiricalCf>(samples, constants, None, opts)
}

/// Dispatch on mode; `sigma2` is required in known mode.
pub fn run_ci(samples: &SampleSet, mode: Mode, sigma2: Option<f64>, constants: &PilotConstants) -> Result<CiOutput> {
    match mode {
        Mode::Known => {
            let s2 = sigma2.ok_or_else(|| Error::Config("known-variance mode needs sigma2".into()))?;
            ci_known_variance(samples, s2, constants)
        }
        Mode::Unknown => ci_unknown_variance(samples, constants),
    }
}
