//! Crude pilot estimates that anchor the certificate scan.
//!
//! The chain is: a blockwise-minimum variance `sigma_breve^2` and the sample
//! median from one half of the data, then a Fourier log-modulus variance and a
//! grid-minimized Fourier mean from the other half. The bundle turns these
//! into the pilot interval and the frequency/variance grids consumed by
//! [`crate::ci`].

use num_complex::Complex64;
use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::ci::Interval;
use crate::ecf::{grid_known, grid_unknown, log_en, EmpiricalCf, FrequencyGrid};
use crate::error::{Error, Result};
use crate::model::{CharacteristicFunction, Holdout, SampleSet, Train};

/// Tunable absolute constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PilotConstants {
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub kappa: f64,
    pub c0: f64,
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    #[serde(rename = "C3")]
    pub c3: f64,
    pub delta: f64,
    pub eps_max: f64,
}

/// Which variance regime a procedure runs in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Known,
    Unknown,
}

/// `Known(sigma2)` carries the given variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VarianceMode {
    Known(f64),
    Unknown,
}

impl VarianceMode {
    pub fn mode(&self) -> Mode {
        match self {
            VarianceMode::Known(_) => Mode::Known,
            VarianceMode::Unknown => Mode::Unknown,
        }
    }
}

impl PilotConstants {
    /// Smallest `kappa` allowed in `mode` for a given `M`.
    pub fn min_kappa(mode: Mode, m: f64) -> f64 {
        match mode {
            Mode::Known => 2f64.sqrt().max(m / std::f64::consts::PI),
            Mode::Unknown => 5f64.sqrt().max(2.0 * m / std::f64::consts::PI),
        }
    }

    pub fn known_default() -> Self {
        let m = 6.0;
        Self {
            m,
            l: 4.0,
            kappa: Self::min_kappa(Mode::Known, m),
            c0: 0.25,
            c1: 1.0,
            c2: 2.0,
            c3: 8.0,
            delta: 0.1,
            eps_max: 0.2,
        }
    }

    pub fn unknown_default() -> Self {
        let m = 6.0;
        Self {
            kappa: Self::min_kappa(Mode::Unknown, m),
            l: 32.0,
            c0: 0.3,
            eps_max: 1.0 / 3.0,
            ..Self::known_default()
        }
    }

    pub fn default_for(mode: Mode) -> Self {
        match mode {
            Mode::Known => Self::known_default(),
            Mode::Unknown => Self::unknown_default(),
        }
    }

    pub fn validate(&self, mode: Mode) -> Result<()> {
        let pos = [
            ("M", self.m),
            ("L", self.l),
            ("kappa", self.kappa),
            ("c0", self.c0),
            ("C1", self.c1),
            ("C2", self.c2),
            ("C3", self.c3),
        ];
        for (name, v) in pos {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.c3 < 1.0 {
            return Err(Error::Config("C3 must be at least 1".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config("delta must lie in (0, 1)".into()));
        }
        let eps_cap = match mode {
            Mode::Known => 0.5,
            Mode::Unknown => 1.0 / 3.0 + 1e-12,
        };
        if !(self.eps_max > 0.0 && self.eps_max < eps_cap) {
            return Err(Error::Config(format!("eps_max {} out of range for {mode:?} variance", self.eps_max)));
        }
        let kmin = Self::min_kappa(mode, self.m);
        if self.kappa < kmin * (1.0 - 1e-12) {
            return Err(Error::Config(format!("kappa {} below the minimum {kmin} for M = {}", self.kappa, self.m)));
        }
        Ok(())
    }
}

/// Pilot estimates plus the grids they induce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PilotBundle {
    pub theta_tilde: f64,
    pub lambda_tilde: f64,
    pub sigma2_tilde: f64,
    pub sigma2_minus: f64,
    pub sigma2_plus: f64,
    pub pilot_interval: Interval,
    pub freq_grid: FrequencyGrid,
    pub variance_grid: Vec<f64>,
    pub n: usize,
}

/// Order-statistic median; even sizes average the middle pair.
pub fn sample_median(samples: &SampleSet) -> f64 {
    let mut v = samples.values().to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Minimum unbiased variance over `ceil(n^C1)` random subsets of size `ceil(C2 log n)`.
pub fn blockwise_variance(samples: &SampleSet, constants: &PilotConstants, seed: u64) -> Result<f64> {
    let x = samples.values();
    let n = x.len();
    let block = (constants.c2 * (n as f64).ln()).ceil() as usize;
    if block <= 2 || block > n {
        return Err(Error::BlockLength { block_len: block, n });
    }
    let blocks = (n as f64).powf(constants.c1).ceil() as usize;
    let mut rng = samples.seed().child(seed).rng();
    let mut best = f64::INFINITY;
    let mut buf = vec![0.0; block];
    for _ in 0..blocks {
        for (slot, i) in buf.iter_mut().zip(index::sample(&mut rng, n, block)) {
            *slot = x[i];
        }
        let mean = buf.iter().sum::<f64>() / block as f64;
        let ss: f64 = buf.iter().map(|v| (v - mean) * (v - mean)).sum();
        best = best.min(ss / (block - 1) as f64);
    }
    Ok(best)
}

const BLOCK_SALT: u64 = 0x626c_6f63_6b73;

fn sigma2_breve(holdout: &Holdout, constants: &PilotConstants) -> Result<f64> {
    let v = blockwise_variance(&holdout.0, constants, BLOCK_SALT)?;
    if !(v > 0.0) {
        return Err(Error::Degenerate("blockwise variance is zero".into()));
    }
    Ok(v)
}

/// `-2 log |phi(t*)| / t*^2` at `t* = c0 sqrt(log(e n)) / sigma_breve`.
pub fn pilot_variance_from<C: CharacteristicFunction + ?Sized>(
    sigma2_breve: f64,
    n: usize,
    cf: &C,
    constants: &PilotConstants,
) -> Result<f64> {
    let t = constants.c0 * log_en(n).sqrt() / sigma2_breve.sqrt();
    let modulus = cf.cf(t).norm();
    if !(modulus > 0.0) {
        return Err(Error::Degenerate(format!("|phi_n(t*)| = 0 at t* = {t}")));
    }
    let v = -2.0 * modulus.ln() / (t * t);
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::Degenerate(format!("pilot variance {v} is not positive")));
    }
    Ok(v)
}

pub fn pilot_variance(holdout: &Holdout, train: &Train, constants: &PilotConstants) -> Result<f64> {
    let sb = sigma2_breve(holdout, constants)?;
    let n = holdout.0.len() + train.0.len();
    pilot_variance_from(sb, n, &EmpiricalCf::new(&train.0), constants)
}

/// Median deviation radius `D = Phi^{-1}((1/2 + sqrt(log(2/delta)/(2 n))) / (1 - eps_max))`.
pub fn median_radius(n: usize, delta: f64, eps_max: f64) -> Result<f64> {
    let p = (0.5 + ((2.0 / delta).ln() / (2.0 * n as f64)).sqrt()) / (1.0 - eps_max);
    if !(p < 1.0) {
        return Err(Error::InsufficientSamples(format!(
            "median radius undefined at n = {n}, delta = {delta}, eps_max = {eps_max}"
        )));
    }
    Ok(Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(p))
}

/// Coarsest equispaced grid of `[lo, hi]` with spacing at most `max_step`.
pub fn uniform_grid(lo: f64, hi: f64, max_step: f64) -> Vec<f64> {
    if !(hi > lo) {
        return vec![lo];
    }
    let pieces = ((hi - lo) / max_step).ceil().max(1.0) as usize;
    (0..=pieces)
        .map(|j| if j == pieces { hi } else { lo + (hi - lo) * j as f64 / pieces as f64 })
        .collect()
}

/// Inputs to the grid-minimized pilot mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PilotMeanInput {
    pub x_med: f64,
    pub sigma2_breve: f64,
    /// Width factor `C`: the variance grid spans `[sigma2_breve / C, C sigma2_breve]`.
    pub spread: f64,
    /// Sample size entering `log(e n)`.
    pub n: usize,
    /// Size of the sample the median came from.
    pub n_median: usize,
}

/// Result of the pilot-mean scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PilotMeanOutput {
    pub theta: f64,
    pub lambda: f64,
    pub loss: f64,
    pub mu_grid_len: usize,
    pub lambda_grid_len: usize,
    pub t_grid_len: usize,
    pub mu_step: f64,
}

/// `alpha = e/(1-e)`, `beta = sqrt((1+alpha^2)/2)`, `gamma = beta/alpha - 1`.
pub fn pilot_mean_shape(eps_max: f64) -> (f64, f64, f64) {
    let alpha = eps_max / (1.0 - eps_max);
    let beta = ((1.0 + alpha * alpha) / 2.0).sqrt();
    (alpha, beta, beta / alpha - 1.0)
}

/// Minimizes `L(mu, lambda) = max_t (| e^{-i mu t + lambda t^2/2} phi(t) / e - (1-e)/e | - 1)_+`
/// over the product grid; ties go to the smallest `mu`, then the smallest `lambda`.
pub fn pilot_mean_from<C: CharacteristicFunction + ?Sized>(
    input: PilotMeanInput,
    cf: &C,
    constants: &PilotConstants,
) -> Result<PilotMeanOutput> {
    let e = constants.eps_max;
    let c = input.spread;
    let sb = input.sigma2_breve.sqrt();
    let d = median_radius(input.n_median, constants.delta, e)?;
    let (_, beta, gamma) = pilot_mean_shape(e);
    let len = log_en(input.n);
    let quarter = len.exp().powf(0.25);
    let t_star = (len / (8.0 * c)).sqrt() / sb;
    let half_width = 2.0 * d * c.sqrt() * sb;

    let ts = uniform_grid(t_star, 2.0 * t_star, beta.acos() / half_width);
    let mus = uniform_grid(
        input.x_med - half_width,
        input.x_med + half_width,
        gamma * e / (16.0 * t_star * quarter),
    );
    let lambdas = uniform_grid(
        input.sigma2_breve / c,
        c * input.sigma2_breve,
        gamma * e / (16.0 * t_star * t_star * quarter),
    );

    let center = (1.0 - e) / e;
    let a: Vec<Complex64> = ts.iter().map(|&t| cf.cf(t) / e).collect();
    let growth: Vec<Vec<f64>> = lambdas
        .iter()
        .map(|&lam| ts.iter().map(|&t| (0.5 * lam * t * t).exp()).collect())
        .collect();

    let per_mu: Vec<(f64, usize)> = mus
        .par_iter()
        .map(|&mu| {
            let rot: Vec<Complex64> = ts.iter().zip(&a).map(|(&t, &v)| v * Complex64::cis(-mu * t)).collect();
            let mut best = (f64::INFINITY, 0usize);
            for (li, g) in growth.iter().enumerate() {
                let mut worst = 0.0f64;
                for (r, &s) in rot.iter().zip(g) {
                    let v = ((r * s) - center).norm() - 1.0;
                    if v > worst {
                        worst = v;
                        if worst >= best.0 {
                            break;
                        }
                    }
                }
                if worst < best.0 {
                    best = (worst, li);
                }
            }
            best
        })
        .collect();

    let (mi, &(loss, li)) = per_mu
        .iter()
        .enumerate()
        .fold(None, |acc: Option<(usize, &(f64, usize))>, (i, v)| match acc {
            Some((_, b)) if b.0 <= v.0 => acc,
            _ => Some((i, v)),
        })
        .expect("mu grid is nonempty");

    Ok(PilotMeanOutput {
        theta: mus[mi],
        lambda: lambdas[li],
        loss,
        mu_grid_len: mus.len(),
        lambda_grid_len: lambdas.len(),
        t_grid_len: ts.len(),
        mu_step: if mus.len() > 1 { mus[1] - mus[0] } else { 0.0 },
    })
}

/// Unknown-variance pilot mean: `sigma_breve^2` and the median from `holdout`, `phi_n` from `train`.
pub fn pilot_mean(holdout: &Holdout, train: &Train, constants: &PilotConstants) -> Result<(f64, f64)> {
    let sb = sigma2_breve(holdout, constants)?;
    let input = PilotMeanInput {
        x_med: sample_median(&holdout.0),
        sigma2_breve: sb,
        spread: constants.c3,
        n: holdout.0.len() + train.0.len(),
        n_median: holdout.0.len(),
    };
    let out = pilot_mean_from(input, &EmpiricalCf::new(&train.0), constants)?;
    Ok((out.theta, out.lambda))
}

/// Builds the pilot bundle. Known mode uses the full sample (split internally
/// between median and CF); unknown mode only ever reads `holdout`.
pub fn pilot_bundle_known(samples: &SampleSet, sigma2: f64, constants: &PilotConstants) -> Result<PilotBundle> {
    constants.validate(Mode::Known)?;
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::Config("sigma2 must be positive and finite".into()));
    }
    let n = samples.len();
    let (h, t) = samples.split_half()?;
    let input = PilotMeanInput {
        x_med: sample_median(&h.0),
        sigma2_breve: sigma2,
        spread: 1.0,
        n,
        n_median: h.0.len(),
    };
    let pm = pilot_mean_from(input, &EmpiricalCf::new(&t.0), constants)?;
    let half = constants.m * sigma2.sqrt() / log_en(n).sqrt();
    Ok(PilotBundle {
        theta_tilde: pm.theta,
        lambda_tilde: pm.lambda,
        sigma2_tilde: sigma2,
        sigma2_minus: sigma2,
        sigma2_plus: sigma2,
        pilot_interval: Interval::new(pm.theta - half, pm.theta + half),
        freq_grid: grid_known(sigma2, constants.kappa, n)?,
        variance_grid: vec![sigma2],
        n,
    })
}

/// Unknown-variance bundle from the holdout half of a sample of total size `n`.
pub fn pilot_bundle_unknown(holdout: &Holdout, n: usize, constants: &PilotConstants) -> Result<PilotBundle> {
    constants.validate(Mode::Unknown)?;
    let (inner_h, inner_t) = holdout.0.split_half()?;
    let sigma2_tilde = pilot_variance(&inner_h, &inner_t, constants)?;
    let (theta_tilde, lambda_tilde) = pilot_mean(&inner_h, &inner_t, constants)?;
    let len = log_en(n);
    let widen = 1.0 + constants.l / len;
    let sigma2_minus = sigma2_tilde / widen;
    let sigma2_plus = sigma2_tilde * widen;
    let half = constants.m * sigma2_plus.sqrt() / len.sqrt();
    let pieces = (4.0 / (constants.kappa * constants.kappa) * (n as f64).sqrt() * len).ceil() as usize;
    let variance_grid = (0..=pieces)
        .map(|k| sigma2_minus + k as f64 * (sigma2_plus - sigma2_minus) / pieces as f64)
        .collect();
    Ok(PilotBundle {
        theta_tilde,
        lambda_tilde,
        sigma2_tilde,
        sigma2_minus,
        sigma2_plus,
        pilot_interval: Interval::new(theta_tilde - half, theta_tilde + half),
        freq_grid: grid_unknown(sigma2_plus, constants.kappa, n)?,
        variance_grid,
        n,
    })
}

/// Dispatches on `mode`; unknown mode uses the first `floor(n/2)` values.
pub fn pilot_bundle(samples: &SampleSet, mode: VarianceMode, constants: &PilotConstants) -> Result<PilotBundle> {
    match mode {
        VarianceMode::Known(s2) => pilot_bundle_known(samples, s2, constants),
        VarianceMode::Unknown => {
            let (h, _) = samples.split_half()?;
            pilot_bundle_unknown(&h, samples.len(), constants)
        }
    }
}
