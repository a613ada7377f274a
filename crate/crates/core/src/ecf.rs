//! Empirical characteristic functions and the `base * sqrt(k)` frequency grids.

use std::collections::HashMap;
use std::sync::RwLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CharacteristicFunction, SampleSet};

const PAIRWISE_LEAF: usize = 64;

/// Pairwise-summed `sum_j (cos(t x_j), sin(t x_j))`.
fn pairwise_cis_sum(xs: &[f64], t: f64) -> (f64, f64) {
    if xs.len() <= PAIRWISE_LEAF {
        let mut c = 0.0;
        let mut s = 0.0;
        for &x in xs {
            let (sn, cs) = (t * x).sin_cos();
            c += cs;
            s += sn;
        }
        return (c, s);
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    let (ca, sa) = pairwise_cis_sum(a, t);
    let (cb, sb) = pairwise_cis_sum(b, t);
    (ca + cb, sa + sb)
}

/// `phi_n(t) = n^{-1} sum_j e^{i t X_j}`, with a lattice cache.
#[derive(Debug)]
pub struct EmpiricalCf<'a> {
    samples: &'a SampleSet,
    cache: RwLock<HashMap<(u64, u64), Complex64>>,
}

impl<'a> EmpiricalCf<'a> {
    pub fn new(samples: &'a SampleSet) -> Self {
        Self {
            samples,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn samples(&self) -> &SampleSet {
        self.samples
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    /// Direct evaluation, no cache.
    pub fn eval(&self, t: f64) -> Complex64 {
        if t == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        let xs = self.samples.values();
        let (c, s) = pairwise_cis_sum(xs, t);
        let n = xs.len() as f64;
        Complex64::new(c / n, s / n)
    }

    /// Value at the `k`-th lattice point of `grid`, cached by `(base, k)`.
    pub fn eval_lattice(&self, grid: &FrequencyGrid, k: u64) -> Complex64 {
        let key = (grid.base.to_bits(), k);
        if let Some(v) = self.cache.read().expect("ecf cache poisoned").get(&key) {
            return *v;
        }
        let v = self.eval(grid.lattice_point(k));
        self.cache.write().expect("ecf cache poisoned").insert(key, v);
        v
    }

    /// Values at every frequency of `grid`, in grid order.
    pub fn eval_grid(&self, grid: &FrequencyGrid) -> Vec<Complex64> {
        grid.ks.iter().map(|&k| self.eval_lattice(grid, k)).collect()
    }
}

impl CharacteristicFunction for EmpiricalCf<'_> {
    fn cf(&self, t: f64) -> Complex64 {
        self.eval(t)
    }
}

pub fn ecf_eval(samples: &SampleSet, t: f64) -> Complex64 {
    EmpiricalCf::new(samples).eval(t)
}

/// Frequencies `base * sqrt(k)` for the listed integers `k >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub base: f64,
    pub ks: Vec<u64>,
}

impl FrequencyGrid {
    pub fn lattice_point(&self, k: u64) -> f64 {
        self.base * (k as f64).sqrt()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.ks.iter().map(|&k| self.lattice_point(k)).collect()
    }

    pub fn len(&self) -> usize {
        self.ks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ks.is_empty()
    }

    pub fn max_frequency(&self) -> f64 {
        self.ks.last().map_or(0.0, |&k| self.lattice_point(k))
    }
}

/// `ceil(log(e n))`.
pub fn log_en_ceil(n: usize) -> u64 {
    log_en(n).ceil() as u64
}

/// `log(e n) = 1 + log n`.
pub fn log_en(n: usize) -> f64 {
    1.0 + (n as f64).ln()
}

fn sqrt_grid(scale2: f64, kappa: f64, n: usize) -> Result<FrequencyGrid> {
    if !(scale2 > 0.0 && scale2.is_finite()) {
        return Err(Error::invalid("sigma2", "must be positive and finite"));
    }
    if !(kappa > 0.0) {
        return Err(Error::invalid("kappa", "must be positive"));
    }
    if n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    Ok(FrequencyGrid {
        base: 1.0 / (kappa * scale2.sqrt()),
        ks: (1..=log_en_ceil(n)).collect(),
    })
}

/// `{ sqrt(k) / (kappa sigma) : k = 1..ceil(log(e n)) }`.
pub fn grid_known(sigma2: f64, kappa: f64, n: usize) -> Result<FrequencyGrid> {
    sqrt_grid(sigma2, kappa, n)
}

/// As [`grid_known`] with the upper pilot variance in place of `sigma2`.
pub fn grid_unknown(sigma2_plus: f64, kappa: f64, n: usize) -> Result<FrequencyGrid> {
    sqrt_grid(sigma2_plus, kappa, n)
}

/// Uniform deviation bound `(t/t1) sqrt(8 log(5/delta) / n)` for a lattice frequency `t`.
pub fn concentration_radius(t: f64, base_t1: f64, n: usize, delta: f64) -> Result<f64> {
    if !(base_t1 > 0.0) {
        return Err(Error::invalid("base_t1", "must be positive"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("delta", "must lie in (0, 1)"));
    }
    if n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    let ratio = t / base_t1;
    let k = ratio * ratio;
    if k < 0.5 || (k - k.round()).abs() > 1e-9 * k.max(1.0) {
        return Err(Error::OffLattice { t, base: base_t1 });
    }
    Ok(ratio * (8.0 * (5.0 / delta).ln() / n as f64).sqrt())
}
