use std::fs;
use std::path::Path;

use nrba::pipeline::{run_pipeline, write_synthetic_bundle, NrbaReport, REPORT_FILE};
use nrba::{NrbaConfig, NrbaError};

const STEP_FILES: [&str; 10] = [
    "step01_missingness.csv",
    "step02_outcomes.csv",
    "step03_outcome_models.csv",
    "step04_external_predictors.csv",
    "step05_propensity.csv",
    "step06_strength.csv",
    "step07_weighting_comparison.csv",
    "step08_external_comparison.csv",
    "step09_sensitivity.csv",
    "step10_item_missingness.csv",
];

fn bundle(dir: &Path, n: usize) -> NrbaConfig {
    let path = write_synthetic_bundle(dir, n, 7).unwrap();
    NrbaConfig::load(&path).unwrap()
}

fn small_config(dir: &Path, responded: impl Fn(usize) -> bool, y_raw: impl Fn(usize) -> String) -> NrbaConfig {
    let mut csv = String::from("x,z,y,r\n");
    for i in 0..80 {
        let x = (i as f64 * 0.37).sin() * 3.0 + i as f64 / 40.0;
        let z = (i % 5) as f64;
        csv.push_str(&format!(
            "{x},{z},{},{}\n",
            if responded(i) { y_raw(i) } else { String::new() },
            u8::from(responded(i))
        ));
    }
    fs::write(dir.join("data.csv"), csv).unwrap();
    let toml = r#"
input = "data.csv"
output_dir = "out"
outcomes = ["y"]
auxiliaries = ["x", "z"]
response_indicator = "r"

[[columns]]
name = "x"
role = "auxiliary"

[[columns]]
name = "z"
role = "auxiliary"

[[columns]]
name = "y"
role = "outcome"
missing-sentinels = ["-9"]

[[columns]]
name = "r"
role = "response-indicator"
"#;
    let path = dir.join("config.toml");
    fs::write(&path, toml).unwrap();
    NrbaConfig::load(&path).unwrap()
}

fn y_of(i: usize) -> String {
    let x = (i as f64 * 0.37).sin() * 3.0 + i as f64 / 40.0;
    format!("{}", 2.0 * x + ((i * 7) % 11) as f64 / 5.0)
}

#[test]
fn bundled_run_writes_every_step() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = bundle(tmp.path(), 800);
    let report = run_pipeline(&cfg).unwrap();
    for f in STEP_FILES {
        assert!(cfg.output_dir.join(f).is_file(), "{f} missing");
        assert!(report.artifacts.iter().any(|a| a == f));
    }
    assert!(cfg.output_dir.join(REPORT_FILE).is_file());
    for a in &report.artifacts {
        assert!(!Path::new(a).is_absolute());
        assert!(cfg.output_dir.join(a).is_file(), "{a} listed but absent");
    }
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(cfg.output_dir.join(REPORT_FILE)).unwrap())
            .unwrap();
    assert_eq!(json["seed"], 7);
    assert_eq!(report.strength.len(), cfg.outcomes.len());
}

#[test]
fn sensitivity_tables_follow_the_phi_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = bundle(tmp.path(), 800);
    cfg.phis = vec![0.0, 0.25, 1.0];
    let report = run_pipeline(&cfg).unwrap();
    let text = fs::read_to_string(cfg.output_dir.join("step09_sensitivity.csv")).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(header.split(',').filter(|h| h.starts_with("mu_phi_")).count(), 3);
    assert_eq!(text.lines().count(), 1 + cfg.outcomes.len());
    check_consistency(&report);
}

fn check_consistency(report: &NrbaReport) {
    for s in &report.sensitivity {
        for t in std::iter::once(&s.table).chain(s.subgroups.iter().map(|g| &g.table)) {
            assert_eq!(t.rows.len(), report.phis.len());
            for row in &t.rows {
                assert!(
                    (row.mu_y - t.respondent_mean - row.nrba).abs() < 1e-8,
                    "{}: {} - {} != {}",
                    s.outcome,
                    row.mu_y,
                    t.respondent_mean,
                    row.nrba
                );
            }
        }
    }
}

#[test]
fn full_response_gives_zero_indices() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), |_| true, y_of);
    let report = run_pipeline(&cfg).unwrap();
    assert!(report.propensity.is_none());
    for row in &report.sensitivity[0].table.rows {
        assert!(row.nrba.abs() < 1e-12);
    }
    assert!(report
        .warnings
        .iter()
        .any(|w| w.code == "W013_NO_NONRESPONDENTS"));
    check_consistency(&report);
}

#[test]
fn a_failing_step_keeps_earlier_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = bundle(tmp.path(), 800);
    cfg.benchmarks[0].label = "not_an_outcome".into();
    let err = run_pipeline(&cfg).unwrap_err();
    match err {
        NrbaError::Step { step, .. } => assert_eq!(step, 8),
        other => panic!("unexpected error {other}"),
    }
    for f in &STEP_FILES[..7] {
        assert!(cfg.output_dir.join(f).is_file(), "{f} missing");
    }
    assert!(!cfg.output_dir.join("step09_sensitivity.csv").exists());
}

#[test]
fn warnings_carry_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = bundle(tmp.path(), 800);
    let report = run_pipeline(&cfg).unwrap();
    assert!(!report.warnings.is_empty());
    for w in &report.warnings {
        assert!(w.code.starts_with('W') && w.code[1..4].chars().all(|c| c.is_ascii_digit()));
        assert!((1..=10).contains(&w.step));
    }
    let csv = fs::read_to_string(cfg.output_dir.join("warnings.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + report.warnings.len());
}

#[test]
fn item_sentinels_are_counted_apart_from_unit_nonresponse() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(
        tmp.path(),
        |i| i % 4 != 0,
        |i| if [1, 2, 3].contains(&i) { "-9".into() } else { y_of(i) },
    );
    let report = run_pipeline(&cfg).unwrap();
    let a = &report.item_missingness[0];
    assert_eq!(a.item_missing, 3);
    assert_eq!(a.unit_nonrespondents, 20);
    assert_eq!(a.unit_respondents, 60);
    assert_eq!(a.total_missing, 23);
    check_consistency(&report);
}
