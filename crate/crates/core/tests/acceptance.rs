//! Acceptance criteria 1 to 9, one line each. Runs without the test harness
//! so every line is printed; exits nonzero when any criterion fails.

mod common;

use std::path::{Path, PathBuf};
use std::time::Instant;

use common::{c, oracle_1d};
use schottky_lab::bakp::*;
use schottky_lab::cliio::random::{random_cell_point, random_complex_vector, random_period_matrix, rng_from_seed};
use schottky_lab::cliio::{ops_selftest, read_fixture, run_suite_with_threads, CheckConfig};
use schottky_lab::identities::*;
use schottky_lab::theta::*;
use schottky_lab::C64;

const ORACLE_TOL: f64 = 1e-12;
const ODD_CONSTANT_TOL: f64 = 1e-10;
const UNIVERSAL_TOL: f64 = 1e-9;
const SCHOTTKY_ZERO_TOL: f64 = 1e-8;
const SCHOTTKY_RANDOM_MIN: f64 = 1e-3;
const HIROTA_TOL: f64 = 1e-8;
const FIT_TOL: f64 = 1e-6;
const FIT_FLOOR_MIN: f64 = 1e-3;
const SECANCY_TOL: f64 = 1e-6;
const WEIL_TOL: f64 = 1e-7;
const SURFACE_TOL: f64 = 1e-8;
const SURFACE_RANDOM_MIN: f64 = 1e-3;
const FLEX_D_TOL: f64 = 1e-5;
const FLEX_THETA_TOL: f64 = 1e-8;
const BA_TOL: f64 = 1e-6;
const KAPPA_DRIFT_TOL: f64 = 1e-5;
const KP_FD_TOL: f64 = 1e-4;

struct Outcome {
    pass: bool,
    detail: String,
}

fn pol() -> TruncationPolicy {
    TruncationPolicy::default()
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn jet_fixture() -> CurveFixture {
    let tau = PeriodMatrix::diagonal(&[c(0.1, 1.1)]).unwrap();
    let mut f = genus1_fixture(&tau, CoordinateJet { a: c(0.3, 0.0), b: c(-0.1, 0.0) }, c(0.1, 0.2), &pol()).unwrap();
    f.points.insert("p".into(), vec![c(0.31, 0.17)]);
    f.points.insert("q".into(), vec![c(-0.22, 0.4)]);
    f
}

fn second_genus1_fixture() -> CurveFixture {
    let tau = PeriodMatrix::diagonal(&[c(-0.2, 0.9)]).unwrap();
    let mut f = genus1_fixture(&tau, CoordinateJet { a: c(-0.2, 0.0), b: c(0.15, 0.0) }, c(0.05, -0.1), &pol()).unwrap();
    f.points.insert("p".into(), vec![c(0.2, 0.1)]);
    f
}

fn samples(tau: &PeriodMatrix, n: usize, seed: u64) -> Vec<Vec<C64>> {
    let mut rng = rng_from_seed(seed);
    (0..n).map(|_| random_cell_point(tau, &mut rng)).collect()
}

fn criterion_1() -> Outcome {
    let mut rng = rng_from_seed(101);
    let mut oracle_err: f64 = 0.0;
    for _ in 0..100 {
        let tau = random_period_matrix(1, &mut rng);
        let z = random_cell_point(&tau, &mut rng);
        let v = theta_eval(&tau, &z, &DirectionalJet::none(), &pol()).unwrap();
        let o = oracle_1d(tau.entry(0, 0), z[0], 0.0, 0.0);
        oracle_err = oracle_err.max((v - o).norm() / o.norm().max(1.0));
    }
    let mut odd: f64 = 0.0;
    let mut bound_ok = true;
    for g in 1..=3 {
        let tau = random_period_matrix(g, &mut rng);
        for chi in all_characteristics(g).into_iter().filter(|c| c.is_odd()) {
            let v = theta_char(&tau, &vec![c(0.0, 0.0); g], &chi, &DirectionalJet::none(), &pol()).unwrap();
            odd = odd.max(v.norm());
        }
        for _ in 0..10 {
            let z = random_cell_point(&tau, &mut rng);
            let d = theta_eval_detailed(&tau, &z, &DirectionalJet::none(), &pol()).unwrap();
            let doubled =
                theta_char_at_radius(&tau, &z, &HalfCharacteristic::zero(g), &DirectionalJet::none(), 2.0 * d.radius as f64)
                    .unwrap();
            bound_ok &= (doubled - d.value).norm() <= d.error_bound;
        }
    }
    Outcome {
        pass: oracle_err < ORACLE_TOL && odd < ODD_CONSTANT_TOL && bound_ok,
        detail: format!(
            "genus-1 oracle max err {oracle_err:.2e} (< {ORACLE_TOL:e}, 100 samples); odd constants max {odd:.2e} (< {ODD_CONSTANT_TOL:e}, g <= 3); doubled radius within bound: {bound_ok}"
        ),
    }
}

fn criterion_2() -> Outcome {
    let mut worst_q: f64 = 0.0;
    let mut worst_a: f64 = 0.0;
    for g in 1..=3 {
        let mut rng = rng_from_seed(200 + g as u64);
        let tau = random_period_matrix(g, &mut rng);
        for _ in 0..100 {
            let z = random_cell_point(&tau, &mut rng);
            let m1: Vec<i64> = (0..g).map(|_| rand::Rng::gen_range(&mut rng, -2..=2)).collect();
            let m2: Vec<i64> = (0..g).map(|_| rand::Rng::gen_range(&mut rng, -2..=2)).collect();
            worst_q = worst_q.max(quasiperiodicity_residual(&tau, &z, &m1, &m2, &pol()).unwrap().residual);
            let x = random_cell_point(&tau, &mut rng);
            let y = random_cell_point(&tau, &mut rng);
            worst_a = worst_a.max(addition_residual(&tau, &x, &y, &pol()).unwrap().residual);
        }
    }
    Outcome {
        pass: worst_q < UNIVERSAL_TOL && worst_a < UNIVERSAL_TOL,
        detail: format!(
            "quasi-periodicity max {worst_q:.2e}, addition max {worst_a:.2e} (< {UNIVERSAL_TOL:e}, 100 samples each, g = 1, 2, 3)"
        ),
    }
}

fn criterion_3() -> Outcome {
    let diag = read_fixture(&fixture("diag4.json")).unwrap();
    let zero = schottky_igusa(&diag.tau, &pol()).unwrap().report.residual;
    let random = random_period_matrix(4, &mut rng_from_seed(42));
    let r = schottky_igusa(&random, &pol()).unwrap().report.residual;
    Outcome {
        pass: zero < SCHOTTKY_ZERO_TOL && r > SCHOTTKY_RANDOM_MIN,
        detail: format!(
            "diagonal blocks |S|/N = {zero:.2e} (< {SCHOTTKY_ZERO_TOL:e}); random seed-42 |S|/N = {r:.4e} (> {SCHOTTKY_RANDOM_MIN:e} required)"
        ),
    }
}

fn criterion_4() -> Outcome {
    let f = jet_fixture();
    let dirs = f.kp_directions();
    let worst = samples(&f.tau, 50, 400)
        .iter()
        .map(|z| hirota_residual(&f.tau, z, &dirs, &pol()).unwrap().residual)
        .fold(0.0, f64::max);
    let fit = fit_kp_parameters(&f.tau, &f.u1, &samples(&f.tau, 20, 5), &samples(&f.tau, 16, 6), &pol(), &FitOptions::default())
        .unwrap();
    let want = dirs.canonical();
    let scale = want.w[0].norm().max(1.0);
    let cs = want.c.unwrap();
    let fit_err = [
        (fit.dirs.v[0] - want.v[0]).norm() / scale,
        (fit.dirs.w[0] - want.w[0]).norm() / scale,
        (fit.dirs.c.unwrap() - cs).norm() / cs.norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let t = random_period_matrix(4, &mut rng_from_seed(42));
    let mut rng = rng_from_seed(43);
    let u = random_complex_vector(4, 1.0, &mut rng);
    let floor = fit_kp_parameters(&t, &u, &samples(&t, 32, 44), &samples(&t, 16, 45), &pol(), &FitOptions { seed: 42, ..Default::default() })
        .unwrap()
        .residual;
    Outcome {
        pass: worst < HIROTA_TOL && fit_err < FIT_TOL && floor > FIT_FLOOR_MIN,
        detail: format!(
            "hirota max {worst:.2e} (< {HIROTA_TOL:e}, 50 samples); fit (V,W,c) rel err {fit_err:.2e} (< {FIT_TOL:e}); random g=4 floor {floor:.2e} (> {FIT_FLOOR_MIN:e})"
        ),
    }
}

fn criterion_5() -> Outcome {
    let f = load_genus2_fixture(&fixture("genus2_y2_x5.json"), &pol()).unwrap();
    let mut sec: f64 = 0.0;
    for p in f.points.values() {
        let q = SecancyQuery { mode: SecancyMode::Flex, points: vec![p.clone()], u: f.u1.clone(), v: f.v.clone().expect("flex direction V") };
        sec = sec.max(secancy_residual(&f.tau, &q, &pol()).unwrap().residual);
    }
    let names = ["p", "q", "r", "s"];
    let pts: [Vec<C64>; 4] = std::array::from_fn(|i| f.points[names[i]].clone());
    let weil = weil_residual(&f.tau, &pts, &samples(&f.tau, 12, 10), &pol()).unwrap().report.residual;
    let mut surf: f64 = 0.0;
    for g1 in [jet_fixture(), second_genus1_fixture()] {
        let dir: Vec<C64> = g1.u1.iter().map(|x| x / x.norm()).collect();
        for b in samples(&g1.tau, 10, 500) {
            let d = theta_divisor_point(&g1.tau, &b, &dir, &pol()).unwrap();
            surf = surf.max(theta_surface_residual(&g1.tau, &g1.u1, &g1.u2, &d.z, SurfaceForm::Corrected, &pol()).unwrap().residual);
        }
    }
    let mut rng = rng_from_seed(42);
    let t = random_period_matrix(3, &mut rng);
    let u = random_complex_vector(3, 1.0, &mut rng);
    let v = random_complex_vector(3, 1.0, &mut rng);
    let base = random_cell_point(&t, &mut rng);
    let d = theta_divisor_point(&t, &base, &u, &pol()).unwrap();
    let off = theta_surface_residual(&t, &u, &v, &d.z, SurfaceForm::Corrected, &pol()).unwrap().residual;
    Outcome {
        pass: sec < SECANCY_TOL && weil < WEIL_TOL && surf < SURFACE_TOL && off > SURFACE_RANDOM_MIN,
        detail: format!(
            "flex secancy max {sec:.2e} (< {SECANCY_TOL:e}); weil {weil:.2e} (< {WEIL_TOL:e}); surface on genus 1 max {surf:.2e} (< {SURFACE_TOL:e}); non-Jacobian sample {off:.2e} (> {SURFACE_RANDOM_MIN:e})"
        ),
    }
}

fn criterion_6() -> Outcome {
    let f = jet_fixture();
    let t = flex_track(&f.tau, &f.u1, &f.u2, &f.z, (0.0, 0.5), 50, &pol()).unwrap();
    let s = flex_track(&f.tau, &f.u1, &[c(0.0, 0.0)], &f.z, (0.0, 0.5), 50, &pol()).unwrap();
    let stationary = s.eq_d.residual.max(s.eq_theta.residual);
    Outcome {
        pass: t.eq_d.residual < FLEX_D_TOL && t.eq_theta.residual < FLEX_THETA_TOL && stationary < FLEX_THETA_TOL,
        detail: format!(
            "|x'' + 2w| {:.2e} (< {FLEX_D_TOL:e}, h_y = 1e-2); quartic identity {:.2e} (< {FLEX_THETA_TOL:e}) over {} points; stationary V = 0 {stationary:.2e}",
            t.eq_d.residual,
            t.eq_theta.residual,
            t.points.len()
        ),
    }
}

fn criterion_7() -> Outcome {
    let reports = ops_selftest().unwrap();
    let failed: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.case_id.as_str()).collect();
    Outcome {
        pass: failed.is_empty(),
        detail: format!("{} operator-algebra properties, failing: {:?}", reports.len(), failed),
    }
}

fn criterion_8() -> Outcome {
    let mut ba: f64 = 0.0;
    let mut drift: f64 = 0.0;
    let windows = [BaWindow::new((0.0, 0.05), (0.0, 0.05), 1), BaWindow::new((0.1, 0.15), (0.2, 0.25), 2)];
    for f in [jet_fixture(), second_genus1_fixture()] {
        for p in f.points.keys() {
            let runs: Vec<BaConsistency> = windows.iter().map(|w| ba_consistency(&f, p, w, &pol()).unwrap()).collect();
            for r in &runs {
                ba = ba.max(r.report.residual);
            }
            for k in 0..2 {
                drift = drift.max((runs[0].kappa[k] - runs[1].kappa[k]).norm());
            }
        }
    }
    let f = jet_fixture();
    let h = 0.01;
    let spec = GridSpec { x: Axis::new(0.0, h, 11), y: Axis::new(0.0, h, 7), t: Axis::new(0.0, h * 1e-3, 7) };
    let fd = kp_fd_residual(&kp_field(&f, &spec, &pol()).unwrap()).unwrap().residual;
    Outcome {
        pass: ba < BA_TOL && drift < KAPPA_DRIFT_TOL && fd < KP_FD_TOL,
        detail: format!(
            "BA held-out max {ba:.2e} (< {BA_TOL:e}); kappa drift {drift:.2e} (< {KAPPA_DRIFT_TOL:e}); kp_fd at h = 0.01 {fd:.3e} (< {KP_FD_TOL:e} required)"
        ),
    }
}

fn criterion_9() -> Outcome {
    let jet = fixture("g1_jet.json");
    let mut configs = Vec::new();
    for (check, genus) in [("addition", 3), ("quasiperiodicity", 2), ("schottky-igusa", 4)] {
        let mut c = CheckConfig::new(check);
        c.genus = genus;
        c.samples = if genus == 4 { 2 } else { 32 };
        c.seed = 9;
        configs.push(c);
    }
    for check in ["hirota", "theta-surface", "ba", "kp-field", "kp-residual", "flex-track"] {
        let mut c = CheckConfig::new(check);
        c.fixture = Some(jet.clone());
        c.samples = 8;
        configs.push(c);
    }
    let mut differing = Vec::new();
    for c in &configs {
        let a = run_suite_with_threads(c, Some(1)).unwrap();
        let b = run_suite_with_threads(c, Some(8)).unwrap();
        if a.to_csv() != b.to_csv() || a.to_json_lines() != b.to_json_lines() {
            differing.push(c.check.clone());
        }
    }
    Outcome {
        pass: differing.is_empty(),
        detail: format!("{} configs byte-identical at 1 and 8 threads, differing: {:?}", configs.len(), differing),
    }
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 9] = [
        (1, "theta engine", criterion_1),
        (2, "universal identities", criterion_2),
        (3, "schottky discrimination", criterion_3),
        (4, "kp/hirota on jacobians", criterion_4),
        (5, "flex chain", criterion_5),
        (6, "flex tracking", criterion_6),
        (7, "operator algebra", criterion_7),
        (8, "ba consistency", criterion_8),
        (9, "determinism", criterion_9),
    ];
    let mut failed = 0;
    for (n, name, f) in criteria {
        let start = Instant::now();
        let o = f();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {n} [{verdict}] {name}: {} ({:.1}s)", o.detail, start.elapsed().as_secs_f64());
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of 9 criteria pass", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
