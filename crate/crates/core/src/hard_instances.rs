//! Lower-bound constructions as concrete, checkable objects.
//!
//! Two families live here. The known-variance pair `(nu0, nu1)` is built by
//! tilting a binomial CF difference and integrating twice, which matches
//! moments `0..=K+1` while concentrating each prior on a single atom. The
//! unknown-variance instance matches a three-atom prior against `N(1, s^2)`
//! on three moments. Moment claims are always re-verified with
//! [`prior_moments`] rather than trusted.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::integrate;

/// A finitely supported probability measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretePrior {
    pub atoms: Vec<(f64, f64)>,
}

impl DiscretePrior {
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::invalid("atoms", "need at least one atom"));
        }
        if atoms.iter().any(|&(x, w)| !x.is_finite() || !w.is_finite() || w < 0.0) {
            return Err(Error::invalid("atoms", "locations finite, weights finite and nonnegative"));
        }
        let s: f64 = atoms.iter().map(|a| a.1).sum();
        if (s - 1.0).abs() > 1e-10 {
            return Err(Error::invalid("atoms", format!("weights sum to {s}")));
        }
        Ok(Self { atoms })
    }

    pub fn point(x: f64) -> Self {
        Self { atoms: vec![(x, 1.0)] }
    }

    /// Total weight on atoms within `1e-15` of `x`.
    pub fn mass_at(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| (a.0 - x).abs() <= 1e-15 * (1.0 + x.abs()))
            .map(|a| a.1)
            .sum()
    }

    pub fn max_abs_location(&self) -> f64 {
        self.atoms.iter().map(|a| a.0.abs()).fold(0.0, f64::max)
    }
}

/// Either side of a chi-square comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Prior {
    Discrete(DiscretePrior),
    Gaussian { mean: f64, variance: f64 },
}

impl Prior {
    pub fn moments(&self, k_max: usize) -> Vec<f64> {
        match self {
            Prior::Discrete(p) => prior_moments(p, k_max),
            Prior::Gaussian { mean, variance } => gaussian_raw_moments(*mean, *variance, k_max),
        }
    }

    /// Density of this prior convolved with `N(0, 1)`.
    pub fn convolved_density(&self, x: f64) -> f64 {
        match self {
            Prior::Discrete(p) => p.atoms.iter().map(|&(y, w)| w * std_normal_pdf(x - y)).sum(),
            Prior::Gaussian { mean, variance } => {
                let v = 1.0 + variance;
                std_normal_pdf((x - mean) / v.sqrt()) / v.sqrt()
            }
        }
    }

    fn window(&self) -> f64 {
        match self {
            Prior::Discrete(p) => p.max_abs_location(),
            Prior::Gaussian { mean, variance } => mean.abs() + 8.0 * (1.0 + variance).sqrt(),
        }
    }
}

fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// `C(n, k)` exactly, for `n <= 64`.
pub fn binomial(n: u32, k: u32) -> u128 {
    assert!(n <= 64 && k <= n, "binomial({n}, {k}) out of range");
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * u128::from(n - i) / u128::from(i + 1);
    }
    c
}

/// Neumaier-compensated sum.
fn compensated_sum(it: impl Iterator<Item = f64>) -> f64 {
    let mut s = 0.0;
    let mut c = 0.0;
    for x in it {
        let t = s + x;
        c += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
        s = t;
    }
    s + c
}

/// The ingredients of the known-variance pair, exposed for inspection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingCoefficients {
    pub k: u32,
    pub tau: f64,
    pub a: f64,
    pub b: f64,
    pub alpha: Vec<f64>,
    pub beta_plus: f64,
    pub beta_minus: f64,
    pub total_even: f64,
    pub total_odd: f64,
}

impl MatchingCoefficients {
    pub fn compute(eps_max: f64, eps: f64, k: u32, tau: f64) -> Result<Self> {
        if !(eps_max > 0.0 && eps_max < 0.5) {
            return Err(Error::invalid("eps_max", "must lie in (0, 1/2)"));
        }
        if !(eps > 0.0 && eps <= eps_max) {
            return Err(Error::invalid("eps", "must lie in (0, eps_max]"));
        }
        if k == 0 || k % 4 != 0 || k > 64 {
            return Err(Error::invalid("K", "must be a positive multiple of 4, at most 64"));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::invalid("tau", "must be positive"));
        }
        let a = eps.sqrt() / 8.0;
        let b = a * eps_max / 2.0;
        let half = f64::from(k / 2);
        let tau2 = tau * tau;
        let shift = |j: u32| f64::from(j) - half;
        let mut alpha = Vec::with_capacity(k as usize + 1);
        for j in 0..=k {
            let d1 = shift(j) + a;
            let d2 = shift(j) + a + b;
            if d1 == 0.0 || d2 == 0.0 {
                return Err(Error::invalid("a, b", "vanishing denominator"));
            }
            alpha.push(binomial(k, j) as f64 * tau2 / (d1 * d2));
        }
        let sign = |j: u32| if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
        let beta_plus = compensated_sum(
            (0..=k).map(|j| sign(j) * binomial(k, j) as f64 * tau2 / ((shift(j) + a + b) * b)),
        );
        let beta_minus =
            compensated_sum((0..=k).map(|j| sign(j) * binomial(k, j) as f64 * tau2 / ((shift(j) + a) * b)));
        let even = compensated_sum((0..=k).filter(|j| j % 2 == 0).map(|j| alpha[j as usize]));
        let odd = compensated_sum((0..=k).filter(|j| j % 2 == 1).map(|j| alpha[j as usize]));
        Ok(Self {
            k,
            tau,
            a,
            b,
            alpha,
            beta_plus,
            beta_minus,
            total_even: beta_plus + even,
            total_odd: beta_minus + odd,
        })
    }

    fn location(&self, j: u32) -> f64 {
        (f64::from(j) - f64::from(self.k / 2) + self.a + self.b) / self.tau
    }
}

/// The moment-matched pair `(nu0, nu1)` concentrated at `0` and `b / tau`.
pub fn matching_priors_known(eps_max: f64, eps: f64, k: u32, tau: f64) -> Result<(DiscretePrior, DiscretePrior)> {
    let c = MatchingCoefficients::compute(eps_max, eps, k, tau)?;
    let t = c.total_even;
    let mut nu0 = vec![(0.0, c.beta_plus / t)];
    let mut nu1 = vec![(c.b / c.tau, c.beta_minus / t)];
    for j in 0..=k {
        let atom = (c.location(j), c.alpha[j as usize] / t);
        if j % 2 == 0 {
            nu0.push(atom);
        } else {
            nu1.push(atom);
        }
    }
    Ok((DiscretePrior::new(nu0)?, DiscretePrior::new(nu1)?))
}

/// The three-atom prior and Gaussian `N(1, s^2)` that share three moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPointInstance {
    pub mu0: DiscretePrior,
    pub gaussian_mean: f64,
    pub gaussian_var: f64,
    pub p: f64,
    pub a: f64,
}

pub fn two_point_instance_unknown(eps_max: f64) -> Result<TwoPointInstance> {
    if !(eps_max > 0.0 && eps_max <= 1.0 / 3.0) {
        return Err(Error::invalid("eps_max", "must lie in (0, 1/3]"));
    }
    let e = eps_max;
    let q = 2.0 * e * e + 9.0 * e + 5.0;
    let a = (q / (3.0 * e + 1.0)).sqrt();
    let y1 = -1.0 / e - a / e;
    let y2 = -1.0 / e + a / e;
    let s2 = (2.0 - e - e * e) / (e * (1.0 + 3.0 * e));
    let p = 0.5 - ((3.0 * e + 1.0) / q).sqrt();
    let mu0 = DiscretePrior::new(vec![(0.0, 1.0 - e), (y1, e * p), (y2, e * (1.0 - p))])?;
    Ok(TwoPointInstance {
        mu0,
        gaussian_mean: 1.0,
        gaussian_var: s2,
        p,
        a,
    })
}

/// `E[X^k]` for `X ~ N(mean, variance)`, `k = 0..=k_max`.
pub fn gaussian_raw_moments(mean: f64, variance: f64, k_max: usize) -> Vec<f64> {
    let mut m = Vec::with_capacity(k_max + 1);
    m.push(1.0);
    if k_max >= 1 {
        m.push(mean);
    }
    for k in 2..=k_max {
        let v = mean * m[k - 1] + (k - 1) as f64 * variance * m[k - 2];
        m.push(v);
    }
    m
}

/// `sum_i w_i y_i^k`, `k = 0..=k_max`, compensated.
pub fn prior_moments(prior: &DiscretePrior, k_max: usize) -> Vec<f64> {
    (0..=k_max)
        .map(|k| compensated_sum(prior.atoms.iter().map(|&(y, w)| w * y.powi(k as i32))))
        .collect()
}

/// Determinants of the Hankel matrices `[m_{i+j}]_{i,j <= l}` for `l = 0..=order`,
/// where `m_0 = 1` and `m_k = E_{N(1, s2)}[X^k] / eps_max` for `k >= 1`.
pub fn hankel_dets(eps_max: f64, s2: f64, order: usize) -> Result<Vec<f64>> {
    if order > 6 {
        return Err(Error::invalid("order", "at most 6"));
    }
    if !(eps_max > 0.0) || s2 < 0.0 {
        return Err(Error::invalid("eps_max, s2", "need eps_max > 0 and s2 >= 0"));
    }
    let mut m = gaussian_raw_moments(1.0, s2, 2 * order);
    for v in m.iter_mut().skip(1) {
        *v /= eps_max;
    }
    Ok((0..=order)
        .map(|l| nalgebra::DMatrix::from_fn(l + 1, l + 1, |i, j| m[i + j]).determinant())
        .collect())
}

/// Closed-form `det H_l` polynomials for `l = 0..=6`.
pub fn hankel_det_closed_form(eps_max: f64, s2: f64, order: usize) -> Option<f64> {
    let e = eps_max;
    let s = s2;
    let v = match order {
        0 => 1.0,
        1 => e.powi(-2) * (e * s + e - 1.0),
        2 => e.powi(-3) * s * ((3.0 * e - 1.0) * s * s + e - 1.0),
        3 => {
            2.0 * e.powi(-4)
                * s.powi(3)
                * ((9.0 * e - 3.0) * s.powi(3) + (9.0 * e - 9.0) * s * s + (3.0 - 3.0 * e) * s + e - 1.0)
        }
        4 => {
            12.0 * e.powi(-5)
                * s.powi(6)
                * ((45.0 * e - 21.0) * s.powi(4) + (30.0 * e - 30.0) * s * s + (8.0 - 8.0 * e) * s + e - 1.0)
        }
        5 => {
            288.0
                * e.powi(-6)
                * s.powi(10)
                * ((225.0 * e - 105.0) * s.powi(5)
                    + (225.0 * e - 225.0) * s.powi(4)
                    + (150.0 - 150.0 * e) * s.powi(3)
                    + (90.0 * e - 90.0) * s * s
                    + (15.0 - 15.0 * e) * s
                    + e
                    - 1.0)
        }
        6 => {
            34560.0
                * e.powi(-7)
                * s.powi(15)
                * ((1575.0 * e - 855.0) * s.powi(6)
                    + (1575.0 * e - 1575.0) * s.powi(4)
                    + (840.0 - 840.0 * e) * s.powi(3)
                    + (225.0 * e - 225.0) * s * s
                    + (24.0 - 24.0 * e) * s
                    + e
                    - 1.0)
        }
        _ => return None,
    };
    Some(v)
}

/// `2 sum_{k=1}^{k_max} (E_{nu0} X^k - E_{nu1} X^k)^2 / k!`.
pub fn chi2_moment_bound(nu0: &DiscretePrior, nu1: &Prior, k_max: usize) -> Result<f64> {
    if nu0.mass_at(0.0) < 0.5 {
        return Err(Error::invalid("nu0", "must place mass at least 1/2 at zero"));
    }
    let m0 = prior_moments(nu0, k_max);
    let m1 = nu1.moments(k_max);
    let mut fact = 1.0;
    let mut terms = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        fact *= k as f64;
        terms.push((m0[k] - m1[k]).powi(2) / fact);
    }
    if let Some(&last) = terms.last() {
        if last >= 1e-15 {
            return Err(Error::invalid("k_max", format!("tail term {last:e} not below 1e-15")));
        }
    }
    Ok(2.0 * compensated_sum(terms.into_iter()))
}

/// `chi^2(nu1 * N(0,1) || nu0 * N(0,1)) = int (p1 - p0)^2 / p0` by adaptive quadrature.
pub fn quadrature_chi2(nu0: &DiscretePrior, nu1: &Prior) -> f64 {
    let p0 = Prior::Discrete(nu0.clone());
    let w = p0.window().max(nu1.window()) + 10.0;
    integrate(
        |x| {
            let a = p0.convolved_density(x);
            let b = nu1.convolved_density(x);
            if a <= 0.0 {
                0.0
            } else {
                (b - a).powi(2) / a
            }
        },
        -w,
        w,
        1e-16,
    )
}
