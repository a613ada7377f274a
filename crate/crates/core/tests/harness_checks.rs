use efronci_core::hard_instances::{matching_priors_known, DiscretePrior, Prior};
use efronci_core::harness::{
    calibrate_constants, default_stress_adversaries, indistinguishability_probe, run_experiment, write_csv,
    AdversarySpec, CalibrationGrid, CalibrationTargets, ExperimentConfig, CSV_HEADER,
};
use efronci_core::pilot::{Mode, PilotConstants};
use efronci_core::Error;

fn config(modes: Vec<Mode>, n_list: Vec<usize>, eps_list: Vec<f64>, adversaries: Vec<AdversarySpec>, trials: usize) -> ExperimentConfig {
    ExperimentConfig {
        modes,
        n_list,
        eps_list,
        adversaries,
        trials,
        delta: 0.1,
        eps_max: 0.2,
        constants: None,
        master_seed: 99,
        theta: 0.0,
        sigma2: 1.0,
    }
}

fn calibrated_known() -> PilotConstants {
    PilotConstants {
        m: 1.0,
        l: 2.0,
        kappa: PilotConstants::min_kappa(Mode::Known, 1.0),
        ..PilotConstants::known_default()
    }
}

#[test]
fn table_shape_and_reproducibility() {
    let cfg = config(
        vec![Mode::Known, Mode::Unknown],
        vec![256, 512],
        vec![0.0, 0.2],
        default_stress_adversaries(),
        6,
    );
    let a = run_experiment(&cfg).unwrap();
    assert_eq!(a.len(), 2 * 2 * 2 * 4);
    let b = run_experiment(&cfg).unwrap();
    for (x, y) in a.iter().zip(&b) {
        let strip = |r: &efronci_core::harness::ExperimentRow| {
            let mut r = r.clone();
            r.wallclock_s = 0.0;
            r
        };
        assert_eq!(strip(x), strip(y));
        assert!((0.0..=1.0).contains(&x.coverage));
        assert_eq!(x.mc_stderr, (x.coverage * (1.0 - x.coverage) / 6.0).sqrt());
    }
    let mut buf = Vec::new();
    write_csv(&a, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(lines.count(), a.len());
}

#[test]
fn length_grows_with_contamination() {
    let cfg = config(
        vec![Mode::Known],
        vec![16384],
        vec![0.0, 0.2],
        vec![AdversarySpec::GaussianMixture {
            components: vec![(1.5, 1.0, 0.5), (-3.0, 0.5, 0.5)],
        }],
        300,
    );
    let rows = run_experiment(&cfg).unwrap();
    assert!(rows[1].median_length >= rows[0].median_length, "{rows:?}");
}

fn small_calibration() -> (ExperimentConfig, CalibrationGrid) {
    let cfg = config(
        vec![Mode::Known],
        vec![1024],
        vec![0.0, 0.2],
        vec![
            AdversarySpec::PointMass { location: 50.0 },
            AdversarySpec::GaussianMixture {
                components: vec![(1.5, 1.0, 0.5), (-3.0, 0.5, 0.5)],
            },
        ],
        40,
    );
    let grid = CalibrationGrid {
        m: vec![0.25, 0.5, 1.0, 2.0],
        l: vec![2.0],
        kappa_multiplier: vec![1.0, 1.5],
        c0: vec![0.25],
    };
    (cfg, grid)
}

#[test]
fn calibration_is_deterministic_and_monotone_in_target() {
    let (cfg, grid) = small_calibration();
    let strict = CalibrationTargets {
        pilot_coverage: 0.95,
        coverage: 0.95,
    };
    let loose = CalibrationTargets {
        pilot_coverage: 0.5,
        coverage: 0.5,
    };
    let a = calibrate_constants(&cfg, &grid, strict).unwrap();
    let b = calibrate_constants(&cfg, &grid, strict).unwrap();
    assert_eq!(a, b);
    let c = calibrate_constants(&cfg, &grid, loose).unwrap();
    assert!(c.constants.m <= a.constants.m);
    for r in [&a, &c] {
        assert!(r.constants.kappa >= PilotConstants::min_kappa(Mode::Known, r.constants.m));
        assert!(r.pilot_coverage >= 0.5 && r.coverage >= 0.5);
    }
}

#[test]
fn calibration_reports_infeasibility() {
    let (cfg, grid) = small_calibration();
    let impossible = CalibrationTargets {
        pilot_coverage: 1.01,
        coverage: 1.01,
    };
    assert!(matches!(calibrate_constants(&cfg, &grid, impossible), Err(Error::Infeasible(_))));
}

#[test]
fn probe_without_signal_has_unit_error_sum() {
    let p = Prior::Discrete(DiscretePrior::point(0.0));
    let r = indistinguishability_probe(&p, &p, 1.0, 4096, 200, Mode::Known, &calibrated_known(), 1).unwrap();
    assert!((r.error_sum - 1.0).abs() <= 0.1, "{r:?}");
}

#[test]
fn probe_separates_at_ten_times_the_rate() {
    let n = 4096;
    let r = 10.0 * (n as f64).powf(-0.25);
    let null = Prior::Discrete(DiscretePrior::point(0.0));
    let alt = Prior::Discrete(DiscretePrior::point(r));
    let out = indistinguishability_probe(&null, &alt, 1.0, n, 200, Mode::Known, &calibrated_known(), 2).unwrap();
    assert!(out.error_sum <= 0.5, "{out:?}");
}

#[test]
fn probe_cannot_separate_matched_priors() {
    let k = 16;
    let tau = std::f64::consts::E * f64::from(k).sqrt();
    let (nu0, nu1) = matching_priors_known(0.2, 0.2, k, tau).unwrap();
    let out = indistinguishability_probe(
        &Prior::Discrete(nu0),
        &Prior::Discrete(nu1),
        1.0,
        4096,
        200,
        Mode::Known,
        &calibrated_known(),
        3,
    )
    .unwrap();
    assert!(out.error_sum >= 0.8, "{out:?}");
}

#[test]
fn config_errors_are_typed() {
    let mut cfg = config(vec![Mode::Known], vec![256], vec![0.0], default_stress_adversaries(), 0);
    assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    cfg.trials = 1;
    cfg.eps_list = vec![0.3];
    assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    assert!(ExperimentConfig::from_json("{\"modes\": 3}").is_err());
}
