#![allow(dead_code)]

use efronci_core::model::{AdversaryDistribution, EfronModel};
use rand::Rng;
use rand_chacha::ChaCha20Rng;

/// Draws a contamination distribution from one of the three families.
pub fn random_adversary(rng: &mut ChaCha20Rng, family: usize) -> AdversaryDistribution {
    match family % 3 {
        0 => AdversaryDistribution::point_mass(rng.gen_range(-60.0..60.0)).unwrap(),
        1 => {
            let k = rng.gen_range(1..=5);
            let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
            let s: f64 = raw.iter().sum();
            AdversaryDistribution::discrete(raw.iter().map(|w| (rng.gen_range(-10.0..10.0), w / s)).collect()).unwrap()
        }
        _ => {
            let k = rng.gen_range(1..=3);
            let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
            let s: f64 = raw.iter().sum();
            AdversaryDistribution::gaussian_mixture(
                raw.iter()
                    .map(|w| (rng.gen_range(-8.0..8.0), rng.gen_range(0.0..4.0), w / s))
                    .collect(),
            )
            .unwrap()
        }
    }
}

/// A random model with `eps <= eps_max`.
pub fn random_model(rng: &mut ChaCha20Rng, eps_max: f64, family: usize) -> EfronModel {
    let theta = rng.gen_range(-5.0..5.0);
    let sigma2 = rng.gen_range(0.2..5.0);
    let eps = rng.gen_range(0.0..=eps_max);
    EfronModel::new(theta, sigma2, eps, random_adversary(rng, family)).unwrap()
}
