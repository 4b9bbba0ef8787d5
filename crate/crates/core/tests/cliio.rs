use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;
use schottky_lab::cliio::*;
use schottky_lab::{Error, C64};

const BIN: &str = env!("CARGO_BIN_EXE_schottky-lab");

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove(THREADS_ENV).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp_file(name: &str, text: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("schottky-lab-{}-{name}", std::process::id()));
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn parse_minimal_fixture() {
    let d = parse_fixture(r#"{"genus":1,"tau":[[[0,1]]],"provenance":"unit"}"#).unwrap();
    assert_eq!(d.genus, 1);
    assert_eq!(d.tau.entry(0, 0), C64::new(0.0, 1.0));
    assert_eq!(d.provenance, "unit");
}

#[test]
fn parse_rejects_missing_provenance() {
    let e = parse_fixture(r#"{"genus":1,"tau":[[[0,1]]]}"#).unwrap_err();
    assert!(matches!(e, Error::SchemaError { .. }), "{e}");
}

#[test]
fn parse_rejects_row_length_mismatch() {
    let e = parse_fixture(r#"{"genus":2,"tau":[[[0,1],[0,0]],[[0,1]]],"provenance":"x"}"#).unwrap_err();
    match e {
        Error::SchemaError { path, .. } => assert!(path.starts_with("$.tau"), "{path}"),
        other => panic!("expected schema error, got {other}"),
    }
}

#[test]
fn fixture_json_round_trips() {
    let d = read_fixture(&fixture("genus2_y2_x5.json")).unwrap();
    let e = parse_fixture(&d.to_json()).unwrap();
    assert_eq!(d.tau, e.tau);
    assert_eq!(d.points, e.points);
    assert_eq!(d.vectors, e.vectors);
}

#[test]
fn config_rejects_unknown_keys() {
    let e = CheckConfig::from_json(r#"{"check":"addition","sammples":3}"#).unwrap_err();
    assert!(matches!(e, Error::SchemaError { .. }));
    let c = CheckConfig::from_json(r#"{"check":"addition","genus":2,"policy":{"max_radius":40}}"#).unwrap();
    assert_eq!(c.genus, 2);
    assert_eq!(c.policy.max_radius, Some(40));
}

#[test]
fn unknown_check_is_rejected() {
    assert!(matches!(run_suite(&CheckConfig::new("trisecant")), Err(Error::UnknownCheck(_))));
    let o = run(&["check", "trisecant"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn addition_genus2_hundred_samples() {
    let o = run(&["check", "addition", "--genus", "2", "--samples", "100", "--seed", "42"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 100);
    assert!(lines.iter().all(|l| l.starts_with("addition,") && l.ends_with(",true")));
    assert!(lines[0].starts_with("addition,0000,"));
    assert_eq!(lines[0].split(',').count(), 6);
}

#[test]
fn schottky_igusa_diagonal_fixture() {
    let f = fixture("diag4.json");
    let o = run(&["check", "schottky-igusa", "--fixture", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn hirota_with_corrupted_w_fails() {
    let mut d = read_fixture(&fixture("g1_jet.json")).unwrap();
    let w: Vec<C64> = d.vector("W").unwrap().iter().map(|x| x * 1.1).collect();
    d.vectors.insert("W".into(), w);
    let p = temp_file("corrupt.json", &d.to_json());
    let o = run(&["check", "hirota", "--fixture", p.to_str().unwrap(), "--samples", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().all(|l| l.ends_with(",false")));
    let good = run(&["check", "hirota", "--fixture", fixture("g1_jet.json").to_str().unwrap(), "--samples", "4"]);
    assert_eq!(good.status.code(), Some(0));
}

#[test]
fn json_output_has_csv_fields() {
    let o = run(&["check", "quasiperiodicity", "--samples", "3", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    for line in stdout(&o).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        for k in ["check", "case_id", "residual", "normalizer", "tolerance", "pass"] {
            assert!(v.get(k).is_some(), "{k} missing in {line}");
        }
        assert_eq!(v["pass"], true);
    }
}

#[test]
fn config_file_and_flag_override() {
    let p = temp_file("config.json", r#"{"check":"addition","genus":2,"samples":5,"seed":9}"#);
    let a = run(&["check", "--config", p.to_str().unwrap()]);
    let b = run(&["check", "addition", "--genus", "2", "--samples", "5", "--seed", "9"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["check", "--config", p.to_str().unwrap(), "--samples", "2"]);
    assert_eq!(stdout(&c).lines().count(), 2);
    let bad = temp_file("bad-config.json", r#"{"check":"addition","colour":1}"#);
    assert_eq!(run(&["check", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn tolerance_override_flips_exit_status() {
    let o = run(&["check", "addition", "--samples", "3", "--tolerance", "0"]);
    let out = stdout(&o);
    let all_pass = out.lines().all(|l| l.ends_with(",true"));
    assert_eq!(o.status.code(), Some(if all_pass { 0 } else { 1 }));
    assert!(!all_pass);
}

#[test]
fn missing_fixture_is_an_error() {
    let o = run(&["check", "addition", "--fixture", "/nonexistent/fixture.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn determinism_across_thread_counts() {
    let g2 = fixture("genus2_y2_x5.json");
    let g1 = fixture("g1_jet.json");
    let mut configs = vec![];
    for (check, genus) in [("addition", 3), ("quasiperiodicity", 2)] {
        let mut c = CheckConfig::new(check);
        c.genus = genus;
        c.samples = 24;
        c.seed = 5;
        configs.push(c);
    }
    for check in ["hirota", "theta-surface", "ba", "kp-field"] {
        let mut c = CheckConfig::new(check);
        c.fixture = Some(g1.clone());
        c.samples = 12;
        configs.push(c);
    }
    let mut c = CheckConfig::new("secancy");
    c.fixture = Some(g2);
    configs.push(c);
    for c in &configs {
        let one = run_suite_with_threads(c, Some(1)).unwrap();
        let eight = run_suite_with_threads(c, Some(8)).unwrap();
        assert_eq!(one.to_csv(), eight.to_csv(), "{}", c.check);
        assert_eq!(one.to_json_lines(), eight.to_json_lines());
    }
}

#[test]
fn threads_env_does_not_change_output() {
    let args = ["check", "addition", "--genus", "2", "--samples", "20", "--seed", "3"];
    let a = Command::new(BIN).args(args).env(THREADS_ENV, "1").output().unwrap();
    let b = Command::new(BIN).args(args).env(THREADS_ENV, "8").output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let bad = Command::new(BIN).args(args).env(THREADS_ENV, "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn theta_eval_matches_library() {
    let o = run(&["theta", "eval", "--tau", "0.1,1.2", "--z", "0.3,-0.2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    let tau = schottky_lab::theta::PeriodMatrix::from_flat(1, &[C64::new(0.1, 1.2)]).unwrap();
    let v = schottky_lab::theta::theta_eval(
        &tau,
        &[C64::new(0.3, -0.2)],
        &schottky_lab::theta::DirectionalJet::none(),
        &schottky_lab::theta::TruncationPolicy::default(),
    )
    .unwrap();
    assert_eq!(row[0].parse::<f64>().unwrap(), v.re);
    assert_eq!(row[1].parse::<f64>().unwrap(), v.im);
    let odd = run(&["theta", "eval", "--tau", "0,1", "--z", "0", "--eps", "0.5", "--delta", "0.5"]);
    let out = stdout(&odd);
    let row: Vec<f64> = out.lines().nth(1).unwrap().split(',').take(2).map(|s| s.parse().unwrap()).collect();
    assert!(row[0].hypot(row[1]) < 1e-14);
}

#[test]
fn spectral_and_ops_subcommands() {
    let o = run(&["spectral", "bc", "--pair", "lame", "--x0", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("b^2 - a^3 + a = 0"), "{}", stdout(&o));
    let o = run(&["spectral", "bc", "--pair", "rational", "--x0", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["ops", "selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().count(), ops_selftest().unwrap().len());
}

#[test]
fn kp_residual_field_export() {
    let p = std::env::temp_dir().join(format!("schottky-lab-{}-field.csv", std::process::id()));
    let f = fixture("g1_jet.json");
    let o = run(&["check", "kp-residual", "--fixture", f.to_str().unwrap(), "--export-csv", p.to_str().unwrap()]);
    assert_eq!(stdout(&o).lines().count(), 1);
    let csv = std::fs::read_to_string(&p).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,y,t,re_u,im_u"));
    assert_eq!(lines.count(), 11 * 7 * 7);
    let o = run(&["check", "addition", "--export-csv", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_help_names_every_identity() {
    let o = run(&["check", "--help"]);
    let out = stdout(&o);
    for c in Check::ALL {
        assert!(out.contains(c.name()) && out.contains(c.about()), "{}", c.name());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn seed_determines_report(seed in any::<u64>(), genus in 1usize..=2) {
        let mut c = CheckConfig::new("quasiperiodicity");
        c.seed = seed;
        c.genus = genus;
        c.samples = 6;
        let a = run_suite_with_threads(&c, Some(1)).unwrap();
        let b = run_suite_with_threads(&c, Some(4)).unwrap();
        prop_assert_eq!(a.to_csv(), b.to_csv());
        prop_assert_eq!(a.exit_code() == 0, a.reports.iter().all(|r| r.pass));
    }
}
