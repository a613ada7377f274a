//! Efron's Gaussian two-groups model.
//!
//! An observation is `N(theta, sigma2)` with probability `1 - eps`; otherwise
//! its mean is first drawn from an adversary `Q` and then Gaussian noise with
//! the same variance is added. The adversary families here all have closed-form
//! characteristic functions, so population CFs are exact.

use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SeedProvenance;

const WEIGHT_TOL: f64 = 1e-9;

/// The contaminating location prior `Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AdversaryDistribution {
    PointMass { location: f64 },
    #[serde(rename = "discrete")]
    DiscreteAtoms { atoms: Vec<(f64, f64)> },
    /// Components are `(mean, variance, weight)`.
    GaussianMixture { components: Vec<(f64, f64, f64)> },
}

impl AdversaryDistribution {
    pub fn point_mass(location: f64) -> Result<Self> {
        if !location.is_finite() {
            return Err(Error::invalid("location", "must be finite"));
        }
        Ok(Self::PointMass { location })
    }

    pub fn discrete(atoms: Vec<(f64, f64)>) -> Result<Self> {
        Self::DiscreteAtoms { atoms }.validated()
    }

    pub fn gaussian_mixture(components: Vec<(f64, f64, f64)>) -> Result<Self> {
        Self::GaussianMixture { components }.validated()
    }

    /// Checks the invariants and renormalizes weights that sum to one within
    /// round-off. Deserialized values should pass through here.
    pub fn validated(self) -> Result<Self> {
        match self {
            Self::PointMass { location } => Self::point_mass(location),
            Self::DiscreteAtoms { atoms } => {
                if atoms.is_empty() {
                    return Err(Error::invalid("atoms", "need at least one atom"));
                }
                if atoms.iter().any(|&(loc, _)| !loc.is_finite()) {
                    return Err(Error::invalid("atoms", "locations must be finite"));
                }
                let w = normalize(atoms.iter().map(|a| a.1).collect())?;
                Ok(Self::DiscreteAtoms {
                    atoms: atoms.iter().zip(w).map(|(&(l, _), w)| (l, w)).collect(),
                })
            }
            Self::GaussianMixture { components } => {
                if components.is_empty() {
                    return Err(Error::invalid("components", "need at least one component"));
                }
                for &(m, v, _) in &components {
                    if !m.is_finite() || !v.is_finite() || v < 0.0 {
                        return Err(Error::invalid(
                            "components",
                            "means must be finite and variances finite and nonnegative",
                        ));
                    }
                }
                let w = normalize(components.iter().map(|c| c.2).collect())?;
                Ok(Self::GaussianMixture {
                    components: components
                        .iter()
                        .zip(w)
                        .map(|(&(m, v, _), w)| (m, v, w))
                        .collect(),
                })
            }
        }
    }

    /// The adversary's characteristic function `xi(t)`.
    pub fn cf(&self, t: f64) -> Complex64 {
        match self {
            Self::PointMass { location } => Complex64::cis(location * t),
            Self::DiscreteAtoms { atoms } => atoms
                .iter()
                .map(|&(loc, w)| Complex64::cis(loc * t) * w)
                .sum(),
            Self::GaussianMixture { components } => components
                .iter()
                .map(|&(m, v, w)| Complex64::from_polar(w * (-0.5 * v * t * t).exp(), m * t))
                .sum(),
        }
    }

    fn draw_location<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::PointMass { location } => *location,
            Self::DiscreteAtoms { atoms } => {
                let i = pick(rng, atoms.iter().map(|a| a.1));
                atoms[i].0
            }
            Self::GaussianMixture { components } => {
                let i = pick(rng, components.iter().map(|c| c.2));
                let (m, v, _) = components[i];
                let z: f64 = rng.sample(StandardNormal);
                m + v.sqrt() * z
            }
        }
    }
}

impl fmt::Display for AdversaryDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PointMass { location } => write!(f, "point_mass({location})"),
            Self::DiscreteAtoms { atoms } => write!(f, "discrete({} atoms)", atoms.len()),
            Self::GaussianMixture { components } => {
                write!(f, "gaussian_mixture({} components)", components.len())
            }
        }
    }
}

fn normalize(w: Vec<f64>) -> Result<Vec<f64>> {
    if w.iter().any(|&x| !x.is_finite() || x < 0.0) {
        return Err(Error::invalid("weights", "must be finite and nonnegative"));
    }
    let s: f64 = w.iter().sum();
    if (s - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::invalid("weights", format!("sum to {s}, not 1")));
    }
    Ok(w.into_iter().map(|x| x / s).collect())
}

fn pick<R: Rng + ?Sized>(rng: &mut R, weights: impl Iterator<Item = f64>) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, w) in weights.enumerate() {
        acc += w;
        if w > 0.0 {
            last = i;
        }
        if u < acc {
            return i;
        }
    }
    last
}

/// Anything that can report a characteristic-function value at `t`.
pub trait CharacteristicFunction: Sync {
    fn cf(&self, t: f64) -> Complex64;
}

/// `(theta, sigma2, eps, Q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfronModel {
    pub theta: f64,
    pub sigma2: f64,
    pub eps: f64,
    pub adversary: AdversaryDistribution,
}

impl EfronModel {
    pub fn new(theta: f64, sigma2: f64, eps: f64, adversary: AdversaryDistribution) -> Result<Self> {
        Self {
            theta,
            sigma2,
            eps,
            adversary,
        }
        .validated()
    }

    /// The uncontaminated model `N(theta, sigma2)`.
    pub fn gaussian(theta: f64, sigma2: f64) -> Result<Self> {
        Self::new(theta, sigma2, 0.0, AdversaryDistribution::PointMass { location: theta })
    }

    pub fn validated(self) -> Result<Self> {
        if !self.theta.is_finite() {
            return Err(Error::invalid("theta", "must be finite"));
        }
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(Error::invalid("sigma2", "must be positive and finite"));
        }
        if !(0.0..0.5).contains(&self.eps) {
            return Err(Error::invalid("eps", "must lie in [0, 1/2)"));
        }
        Ok(Self {
            adversary: self.adversary.validated()?,
            ..self
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(text)?;
        m.validated()
    }

    /// `phi(t) = (1-eps) e^{i theta t - sigma2 t^2/2} + eps e^{-sigma2 t^2/2} xi(t)`.
    pub fn population_cf(&self, t: f64) -> Complex64 {
        if t == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        let g = (-0.5 * self.sigma2 * t * t).exp();
        let null = Complex64::cis(self.theta * t);
        if self.eps == 0.0 {
            return null * g;
        }
        (null * (1.0 - self.eps) + self.adversary.cf(t) * self.eps) * g
    }

    pub fn sample(&self, n: usize, seed: SeedProvenance) -> SampleSet {
        let mut rng = seed.rng();
        let sd = self.sigma2.sqrt();
        let values = (0..n)
            .map(|_| {
                let contaminated = self.eps > 0.0 && rng.gen::<f64>() < self.eps;
                let loc = if contaminated {
                    self.adversary.draw_location(&mut rng)
                } else {
                    self.theta
                };
                let z: f64 = rng.sample(StandardNormal);
                loc + sd * z
            })
            .collect();
        SampleSet { values, seed }
    }
}

impl CharacteristicFunction for EfronModel {
    fn cf(&self, t: f64) -> Complex64 {
        self.population_cf(t)
    }
}

/// Free-function form of [`EfronModel::sample`] with a plain 64-bit seed.
pub fn sample(model: &EfronModel, n: usize, seed: u64) -> Result<SampleSet> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    Ok(model.sample(n, SeedProvenance::new(seed, 0)))
}

pub fn population_cf(model: &EfronModel, t: f64) -> Complex64 {
    model.population_cf(t)
}

pub fn adversary_cf(q: &AdversaryDistribution, t: f64) -> Complex64 {
    q.cf(t)
}

/// An ordered sample with a record of the stream that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    values: Vec<f64>,
    seed: SeedProvenance,
}

impl SampleSet {
    pub fn new(values: Vec<f64>, seed: SeedProvenance) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample { index });
        }
        Ok(Self { values, seed })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn seed(&self) -> SeedProvenance {
        self.seed
    }

    /// `x -> x + c`, keeping provenance.
    pub fn translated(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|x| x + c).collect(),
            seed: self.seed,
        }
    }

    /// `x -> s x`, keeping provenance.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            values: self.values.iter().map(|x| s * x).collect(),
            seed: self.seed,
        }
    }

    /// Splits into the first `floor(n/2)` values and the rest.
    pub fn split_half(&self) -> Result<(Holdout, Train)> {
        let k = self.len() / 2;
        if k == 0 {
            return Err(Error::InsufficientSamples(format!(
                "cannot split a sample of size {}",
                self.len()
            )));
        }
        let (a, b) = self.values.split_at(k);
        Ok((
            Holdout(Self {
                values: a.to_vec(),
                seed: self.seed,
            }),
            Train(Self {
                values: b.to_vec(),
                seed: self.seed,
            }),
        ))
    }

    pub fn read_text(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let mut values = Vec::new();
        for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
            let line = line?;
            let s = line.trim();
            if s.is_empty() {
                continue;
            }
            let v: f64 = s
                .parse()
                .map_err(|_| Error::Config(format!("line {}: cannot parse `{s}` as a number", i + 1)))?;
            values.push(v);
        }
        Self::new(values, SeedProvenance::default())
    }

    pub fn write_text(&self, path: &Path) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        for v in &self.values {
            writeln!(w, "{v:?}")?;
        }
        w.flush()?;
        Ok(())
    }
}

/// The half of a split sample reserved for scale and location anchors.
#[derive(Debug, Clone, PartialEq)]
pub struct Holdout(pub SampleSet);

/// The half of a split sample that feeds empirical characteristic functions.
#[derive(Debug, Clone, PartialEq)]
pub struct Train(pub SampleSet);
