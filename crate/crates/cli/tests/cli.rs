use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn efronci(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_efronci"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_samples(dir: &TempDir, n: usize) -> std::path::PathBuf {
    let path = dir.path().join("data.txt");
    // A deterministic, roughly Gaussian-looking sample around 2.
    let text: Vec<String> = (0..n)
        .map(|i| {
            let u = (i as f64 + 0.5) / n as f64;
            let z = (u * 12.0 - 6.0).tanh() * 1.7;
            format!("{}", 2.0 + z)
        })
        .collect();
    fs::write(&path, text.join("\n")).unwrap();
    path
}

#[test]
fn ci_known_prints_interval_and_report() {
    let dir = TempDir::new().unwrap();
    let data = write_samples(&dir, 2000);
    let report = dir.path().join("report.json");
    let out = efronci(&[
        "ci-known", "--sigma2", "1", "--delta", "0.1", "--eps-max", "0.2", "--input", p(&data), "--report", p(&report),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with('['));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(json["mode"], "known");
    assert!(json["pilot"]["theta_tilde"].is_number());
    assert!(json["reports"].as_array().unwrap().len() > 1);
}

#[test]
fn ci_unknown_runs() {
    let dir = TempDir::new().unwrap();
    let data = write_samples(&dir, 2000);
    let out = efronci(&["ci-unknown", "--delta", "0.1", "--eps-max", "0.3", "--input", p(&data)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let data = write_samples(&dir, 500);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"M\": -1}").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["ci-known", "--sigma2", "-1", "--delta", "0.1", "--eps-max", "0.2", "--input", p(&data)],
        vec!["ci-known", "--sigma2", "1", "--delta", "0.1", "--eps-max", "0.2", "--input", "/nonexistent/file"],
        vec!["ci-known", "--sigma2", "1", "--delta", "1.5", "--eps-max", "0.2", "--input", p(&data)],
        vec!["ci-unknown", "--delta", "0.1", "--eps-max", "0.4", "--input", p(&data)],
        vec!["ci-known", "--sigma2", "1", "--delta", "0.1", "--eps-max", "0.2", "--input", p(&data), "--constants", p(&bad)],
        vec!["simulate", "--config", p(&bad), "--out", "/tmp/unused.csv"],
        vec!["hard-instance", "--mode", "matching-known", "--eps-max", "0.2", "--out", "/tmp/unused.json"],
        vec!["no-such-command"],
    ];
    for args in cases {
        let out = efronci(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn simulate_writes_the_results_table() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("exp.json");
    fs::write(
        &cfg,
        r#"{"modes":["known","unknown"],"n_list":[256,512],"eps_list":[0.0,0.1],
            "adversaries":[{"type":"point_mass","location":50.0},{"type":"near_point_mass","scale":1.0}],
            "trials":4,"delta":0.1,"eps_max":0.2,"master_seed":3}"#,
    )
    .unwrap();
    let csv = dir.path().join("out.csv");
    let out = efronci(&["simulate", "--config", p(&cfg), "--out", p(&csv)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "mode,n,eps,adversary,trials,coverage,mc_stderr,mean_length,median_length,empty_rate,wallclock_s"
    );
    assert_eq!(lines.count(), 16);
}

#[test]
fn hard_instances_are_verified() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let out = efronci(&[
        "hard-instance", "--mode", "matching-known", "--eps-max", "0.25", "--eps", "0.2", "--K", "16", "--out", p(&a),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(a).unwrap()).unwrap();
    assert_eq!(v["verified"], true);
    assert_eq!(v["moments"].as_array().unwrap().len(), 18);

    let b = dir.path().join("b.json");
    let out = efronci(&["hard-instance", "--mode", "two-point-unknown", "--eps-max", "0.3333333333333333", "--out", p(&b)]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(b).unwrap()).unwrap();
    assert_eq!(v["verified"], true);
    assert_eq!(v["mu0"].as_array().unwrap().len(), 3);
}

#[test]
fn calibrate_emits_constants_or_reports_infeasibility() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cal.json");
    let body = |target: f64| {
        format!(
            r#"{{"experiment":{{"modes":["known"],"n_list":[512],"eps_list":[0.0],
                "adversaries":[{{"type":"point_mass","location":50.0}}],
                "trials":10,"delta":0.1,"eps_max":0.2,"master_seed":5}},
               "grid":{{"M":[1.0,2.0],"L":[2.0],"kappa_multiplier":[1.0],"c0":[0.25]}},
               "targets":{{"pilot_coverage":{target},"coverage":{target}}}}}"#
        )
    };
    fs::write(&cfg, body(0.5)).unwrap();
    let out_path = dir.path().join("constants.json");
    let out = efronci(&["calibrate", "--config", p(&cfg), "--out", p(&out_path)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert!(v["M"].is_number() && v["kappa"].is_number());

    fs::write(&cfg, body(1.5)).unwrap();
    let out = efronci(&["calibrate", "--config", p(&cfg), "--out", p(&out_path)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn disk_geometry_dump() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("disk.csv");
    let out = efronci(&["disk-geometry", "--eps-max", "0.2", "--eps", "0.0", "--points", "3", "--out", p(&path)]);
    assert!(out.status.success());
    let text = fs::read_to_string(path).unwrap();
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((last[3] - 1.6).abs() < 1e-12);
}
