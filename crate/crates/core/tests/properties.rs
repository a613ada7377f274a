mod common;

use efronci_core::certificates::{
    disk_distance, order1_certificate, order1_cosine_form, order2_certificate, order3_residuals, toeplitz_psd_check,
    upsilon_known, upsilon_unknown,
};
use efronci_core::ecf::{ecf_eval, grid_known, EmpiricalCf};
use efronci_core::model::{sample, EfronModel, SampleSet};
use efronci_core::rng::SeedProvenance;
use efronci_core::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn model_strategy() -> impl Strategy<Value = EfronModel> {
    (any::<u64>(), 0usize..3, 0.0..0.49f64).prop_map(|(seed, family, eps_max)| {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        common::random_model(&mut rng, eps_max, family)
    })
}

fn samples_strategy() -> impl Strategy<Value = SampleSet> {
    prop::collection::vec(-1e3..1e3f64, 1..200).prop_map(|v| SampleSet::new(v, SeedProvenance::new(0, 0)).unwrap())
}

fn unit_disk() -> impl Strategy<Value = Complex64> {
    (0.0..1.0f64, -std::f64::consts::PI..std::f64::consts::PI).prop_map(|(r, a)| Complex64::from_polar(r, a))
}

proptest! {
    #[test]
    fn population_cf_is_a_cf(model in model_strategy(), t in -20.0..20.0f64) {
        let v = model.population_cf(t);
        prop_assert!(v.norm() <= 1.0 + 1e-12);
        prop_assert_eq!(model.population_cf(0.0), Complex64::new(1.0, 0.0));
        let w = model.population_cf(-t);
        prop_assert!((w - v.conj()).norm() <= 1e-15);
    }

    #[test]
    fn clean_part_certifies_on_dense_grid(model in model_strategy()) {
        for i in 0..400 {
            let t = i as f64 * 0.01;
            if model.sigma2 * t * t > 600.0 {
                break;
            }
            let u = upsilon_known(model.population_cf(t), t, model.theta, model.sigma2).unwrap();
            prop_assert!(u.norm() <= 1.0 + 1e-12, "t = {t}: |Upsilon| = {}", u.norm());
        }
    }

    #[test]
    fn ecf_is_bounded_and_hermitian(s in samples_strategy(), t in -50.0..50.0f64) {
        let v = ecf_eval(&s, t);
        prop_assert!(v.norm() <= 1.0 + 1e-12);
        prop_assert_eq!(ecf_eval(&s, 0.0), Complex64::new(1.0, 0.0));
        prop_assert!((ecf_eval(&s, -t) - v.conj()).norm() <= 1e-13);
    }

    #[test]
    fn cached_lattice_matches_direct(s in samples_strategy(), sigma2 in 0.1..5.0f64, n in 2usize..100_000) {
        let grid = grid_known(sigma2, 2f64.sqrt(), n).unwrap();
        let cf = EmpiricalCf::new(&s);
        let first = cf.eval_grid(&grid);
        let second = cf.eval_grid(&grid);
        for ((a, b), t) in first.iter().zip(&second).zip(grid.frequencies()) {
            prop_assert_eq!(a, b);
            prop_assert_eq!(*a, ecf_eval(&s, t));
        }
    }

    #[test]
    fn cosine_form_agrees_with_modulus(
        phi in unit_disk(),
        t in 0.05..3.0f64,
        mu in -10.0..10.0f64,
        sigma2 in 0.1..3.0f64,
        slack in 0.0..2.0f64,
    ) {
        let u = upsilon_known(phi, t, mu, sigma2).unwrap();
        let m = order1_certificate(u, slack);
        prop_assume!(m.margin.abs() > 1e-9);
        prop_assert_eq!(m.passed, order1_cosine_form(phi, t, mu, sigma2, slack));
    }

    #[test]
    fn order1_wraps_with_period(
        phi in unit_disk(),
        t in 0.05..3.0f64,
        mu in -10.0..10.0f64,
        sigma2 in 0.1..3.0f64,
        slack in 0.0..1.0f64,
    ) {
        let period = 2.0 * std::f64::consts::PI / t;
        let a = order1_certificate(upsilon_known(phi, t, mu, sigma2).unwrap(), slack);
        let b = order1_certificate(upsilon_known(phi, t, mu + period, sigma2).unwrap(), slack);
        prop_assert!((a.margin - b.margin).abs() <= 1e-10);
        if a.margin.abs() > 1e-10 {
            prop_assert_eq!(a.passed, b.passed);
        }
    }

    #[test]
    fn disk_distance_nonnegative_and_monotone(eps_max in 0.0..0.49f64, frac in 0.0..=1.0f64, a in 0.0..3.1f64) {
        let eps = frac * eps_max;
        let d0 = disk_distance(eps_max, eps, a);
        let d1 = disk_distance(eps_max, eps, (a + 0.01).min(std::f64::consts::PI));
        prop_assert!(d0 >= 0.0);
        prop_assert!(d1 >= d0);
    }
}

#[test]
fn sylvester_reduction_on_random_inputs() {
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let mut compared = 0;
    for _ in 0..10_000 {
        let a = Complex64::from_polar(rng.gen_range(0.0..1.2), rng.gen_range(-3.2..3.2));
        let b = Complex64::from_polar(rng.gen_range(0.0..1.2), rng.gen_range(-3.2..3.2));
        let m1 = order1_certificate(a, 0.0);
        let m2 = order2_certificate(a, b, 0.0);
        if m1.margin.abs() < 1e-6 || m2.margin.abs() < 1e-6 {
            continue;
        }
        let (psd, _) = toeplitz_psd_check(&[Complex64::new(1.0, 0.0), a, b], 2).unwrap();
        assert_eq!(psd, m1.passed && m2.passed, "a = {a}, b = {b}");
        compared += 1;
    }
    assert!(compared > 9_000);
}

#[test]
fn genuine_residual_functions_are_positive_definite_sequences() {
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    for i in 0..200 {
        let model = common::random_model(&mut rng, 1.0 / 3.0, i);
        for t in grid_known(model.sigma2, 5f64.sqrt(), 4096).unwrap().frequencies() {
            let u: Vec<Complex64> = (1..=3)
                .map(|k| {
                    let s = k as f64 * t;
                    upsilon_unknown(model.population_cf(s), s, model.theta, model.sigma2).unwrap()
                })
                .collect();
            let r = order3_residuals(u[0], u[1], u[2]);
            assert!(r.iter().all(|&x| x >= -1e-10), "{r:?}");
            let z = [Complex64::new(1.0, 0.0), u[0], u[1], u[2]];
            assert!(toeplitz_psd_check(&z, 3).unwrap().0);
        }
    }
}

#[test]
fn empirical_cf_concentrates_at_large_n() {
    let model = EfronModel::gaussian(0.5, 1.0).unwrap();
    let n = 1_000_000;
    let t = 0.8;
    let exact = model.population_cf(t);
    let hits = (0..10)
        .filter(|&seed| {
            let s = sample(&model, n, seed).unwrap();
            (ecf_eval(&s, t) - exact).norm() <= 5.0 / (n as f64).sqrt()
        })
        .count();
    assert!(hits >= 9, "{hits} of 10 within 5/sqrt(n)");
}
