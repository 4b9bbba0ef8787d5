use std::f64::consts::PI;

use approx::assert_relative_eq;
use proptest::prelude::*;
use schottky_lab::cliio::random::{random_cell_point, random_complex_vector, random_period_matrix, rng_from_seed};
use schottky_lab::theta::*;
use schottky_lab::C64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn tau_i() -> PeriodMatrix {
    PeriodMatrix::diagonal(&[c(0.0, 1.0)]).unwrap()
}

/// Direct 1-D sum over |n| ≤ 60 with characteristic shifts.
fn oracle_1d(tau: C64, z: C64, eps: f64, delta: f64) -> C64 {
    (-60..=60)
        .map(|n| {
            let m = n as f64 + eps;
            (C64::new(0.0, PI) * m * m * tau + C64::new(0.0, 2.0 * PI) * m * (z + delta)).exp()
        })
        .sum()
}

fn tight() -> TruncationPolicy {
    TruncationPolicy::new(1e-15, 60).unwrap()
}

#[test]
fn theta_at_i_zero() {
    let v = theta_eval(&tau_i(), &[c(0.0, 0.0)], &DirectionalJet::none(), &tight()).unwrap();
    let direct: f64 = (-30..=30).map(|n: i32| (-PI * (n * n) as f64).exp()).sum();
    assert_relative_eq!(v.re, direct, epsilon = 1e-15);
    assert_relative_eq!(v.re, 1.086434811213308, epsilon = 1e-14);
    assert!(v.im.abs() < 1e-15);
}

#[test]
fn theta_vanishes_at_odd_half_period() {
    let v = theta_eval(&tau_i(), &[c(0.5, 0.5)], &DirectionalJet::none(), &tight()).unwrap();
    assert!(v.norm() < 1e-14);
}

#[test]
fn characteristic_zero_half() {
    let chi = HalfCharacteristic::new(&[0.0], &[0.5]).unwrap();
    let v = theta_char(&tau_i(), &[c(0.0, 0.0)], &chi, &DirectionalJet::none(), &tight()).unwrap();
    let direct: f64 = (-30..=30).map(|n: i32| if n % 2 == 0 { 1.0 } else { -1.0 } * (-PI * (n * n) as f64).exp()).sum();
    assert_relative_eq!(v.re, direct, epsilon = 1e-15);
    assert!((v.re - 0.913579).abs() < 1e-6);
}

#[test]
fn second_order_at_i_zero() {
    let v = theta_second_order(&tau_i(), &[c(0.0, 0.0)], &[0.0], &DirectionalJet::none(), &tight()).unwrap();
    let direct: f64 = (-30..=30).map(|n: i32| (-2.0 * PI * (n * n) as f64).exp()).sum();
    assert_relative_eq!(v.re, direct, epsilon = 1e-15);
    assert!((v.re - 1.0037349).abs() < 1e-7);
}

#[test]
fn genus_one_against_direct_sum() {
    let mut rng = rng_from_seed(11);
    for _ in 0..50 {
        let tau = random_period_matrix(1, &mut rng);
        let z = random_cell_point(&tau, &mut rng);
        for (eps, delta) in [(0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (0.5, 0.5)] {
            let chi = HalfCharacteristic::new(&[eps], &[delta]).unwrap();
            let v = theta_char(&tau, &z, &chi, &DirectionalJet::none(), &tight()).unwrap();
            let o = oracle_1d(tau.entry(0, 0), z[0], eps, delta);
            assert!((v - o).norm() <= 1e-12 * o.norm().max(1.0), "{v} vs {o}");
        }
    }
}

#[test]
fn derivative_against_direct_sum() {
    // d/dz of the 1-D oracle, termwise
    let tau = c(0.2, 0.8);
    let z = c(0.3, 0.1);
    let d: C64 = (-60..=60)
        .map(|n| {
            let m = n as f64;
            C64::new(0.0, 2.0 * PI) * m * (C64::new(0.0, PI) * m * m * tau + C64::new(0.0, 2.0 * PI) * m * z).exp()
        })
        .sum();
    let t = PeriodMatrix::diagonal(&[tau]).unwrap();
    let v = theta_eval(&t, &[z], &DirectionalJet::along(&[c(1.0, 0.0)], 1), &tight()).unwrap();
    assert!((v - d).norm() < 1e-11 * d.norm());
}

#[test]
fn odd_derivatives_vanish_at_origin() {
    let mut rng = rng_from_seed(3);
    for g in 1..=3 {
        let tau = random_period_matrix(g, &mut rng);
        let dir = random_complex_vector(g, 1.0, &mut rng);
        for order in [1, 3] {
            let v = theta_eval(&tau, &vec![c(0.0, 0.0); g], &DirectionalJet::along(&dir, order), &tight()).unwrap();
            assert!(v.norm() < 1e-10, "g={g} order={order} {v}");
        }
    }
}

#[test]
fn odd_theta_constants_vanish() {
    let mut rng = rng_from_seed(5);
    for g in 1..=3 {
        let tau = random_period_matrix(g, &mut rng);
        for chi in all_characteristics(g).into_iter().filter(|c| c.is_odd()) {
            let v = theta_char(&tau, &vec![c(0.0, 0.0); g], &chi, &DirectionalJet::none(), &tight()).unwrap();
            assert!(v.norm() < 1e-10);
        }
    }
}

#[test]
fn zero_characteristic_matches_plain_theta() {
    let mut rng = rng_from_seed(8);
    let tau = random_period_matrix(2, &mut rng);
    let z = random_cell_point(&tau, &mut rng);
    let a = theta_eval(&tau, &z, &DirectionalJet::none(), &tight()).unwrap();
    let b = theta_char(&tau, &z, &HalfCharacteristic::zero(2), &DirectionalJet::none(), &tight()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn second_order_is_char_of_doubled() {
    let mut rng = rng_from_seed(9);
    for g in 1..=3 {
        let tau = random_period_matrix(g, &mut rng);
        let z = random_cell_point(&tau, &mut rng);
        let eps = eps_from_index(g, (1 << g) - 1);
        let a = theta_second_order(&tau, &z, &eps, &DirectionalJet::none(), &tight()).unwrap();
        let z2: Vec<C64> = z.iter().map(|x| x * 2.0).collect();
        let chi = HalfCharacteristic::new(&eps, &vec![0.0; g]).unwrap();
        let b = theta_char(&tau.scaled(2.0), &z2, &chi, &DirectionalJet::none(), &tight()).unwrap();
        assert!((a - b).norm() <= 1e-13 * b.norm().max(1.0));
        let mz: Vec<C64> = z.iter().map(|x| -x).collect();
        let a2 = theta_second_order(&tau, &mz, &eps, &DirectionalJet::none(), &tight()).unwrap();
        assert!((a - a2).norm() <= 1e-12 * a.norm().max(1.0));
    }
}

#[test]
fn second_order_derivative_has_chain_factor_two() {
    let tau = PeriodMatrix::diagonal(&[c(0.1, 0.9)]).unwrap();
    let z = c(0.2, 0.15);
    let h = 1e-5;
    let f = |w: C64| theta_second_order(&tau, &[w], &[0.5], &DirectionalJet::none(), &tight()).unwrap();
    let fd = (f(z + h) - f(z - h)) / (2.0 * h);
    let d = theta_second_order(&tau, &[z], &[0.5], &DirectionalJet::along(&[c(1.0, 0.0)], 1), &tight()).unwrap();
    assert!((fd - d).norm() < 1e-6 * d.norm());
}

#[test]
fn kummer_vector_shape_and_evenness() {
    let mut rng = rng_from_seed(10);
    let tau = random_period_matrix(1, &mut rng);
    let z = random_cell_point(&tau, &mut rng);
    let k = kummer_vector(&tau, &z, &DirectionalJet::none(), &tight()).unwrap();
    assert_eq!(k.len(), 2);
    let tau3 = random_period_matrix(3, &mut rng);
    let z3 = random_cell_point(&tau3, &mut rng);
    let mz: Vec<C64> = z3.iter().map(|x| -x).collect();
    let a = kummer_vector(&tau3, &z3, &DirectionalJet::none(), &tight()).unwrap();
    let b = kummer_vector(&tau3, &mz, &DirectionalJet::none(), &tight()).unwrap();
    assert_eq!(a.len(), 8);
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).norm() <= 1e-12 * x.norm().max(1.0));
    }
}

#[test]
fn kummer_vector_is_projectively_periodic() {
    let mut rng = rng_from_seed(12);
    let tau = random_period_matrix(2, &mut rng);
    let z = random_cell_point(&tau, &mut rng);
    let lam = tau.lattice_vector(&[1, -1], &[0, 1]);
    let zl: Vec<C64> = z.iter().zip(&lam).map(|(a, b)| a + b).collect();
    let a = kummer_vector(&tau, &z, &DirectionalJet::none(), &tight()).unwrap();
    let b = kummer_vector(&tau, &zl, &DirectionalJet::none(), &tight()).unwrap();
    let na = schottky_lab::linalg::norm(&a);
    let nb = schottky_lab::linalg::norm(&b);
    assert!(schottky_lab::linalg::max_minor2(&a, &b) < 1e-10 * na * nb);
}

#[test]
fn radius_is_monotone_in_tolerance() {
    let mut rng = rng_from_seed(13);
    for g in 1..=4 {
        let tau = random_period_matrix(g, &mut rng);
        let z = random_cell_point(&tau, &mut rng);
        let r6 = truncation_radius(&tau, &z, &TruncationPolicy::new(1e-6, 60).unwrap()).unwrap();
        let r12 = truncation_radius(&tau, &z, &TruncationPolicy::new(1e-12, 60).unwrap()).unwrap();
        assert!(r6 <= r12);
    }
}

#[test]
fn tail_bound_dominates_extra_shells() {
    let mut rng = rng_from_seed(14);
    for g in 1..=3 {
        let tau = random_period_matrix(g, &mut rng);
        let z = random_cell_point(&tau, &mut rng);
        let policy = TruncationPolicy::new(1e-6, 60).unwrap();
        let r = truncation_radius(&tau, &z, &policy).unwrap() as f64;
        let chi = HalfCharacteristic::zero(g);
        let inner = theta_char_at_radius(&tau, &z, &chi, &DirectionalJet::none(), r).unwrap();
        let outer = theta_char_at_radius(&tau, &z, &chi, &DirectionalJet::none(), r + 10.0).unwrap();
        let scale = theta_eval_detailed(&tau, &z, &DirectionalJet::none(), &policy).unwrap().error_bound
            / tail_bound(&tau, r);
        assert!((outer - inner).norm() <= tail_bound(&tau, r) * scale);
    }
}

#[test]
fn doubling_radius_stays_within_bound() {
    let mut rng = rng_from_seed(15);
    for g in 1..=3 {
        let tau = random_period_matrix(g, &mut rng);
        let z = random_cell_point(&tau, &mut rng);
        let d = theta_eval_detailed(&tau, &z, &DirectionalJet::none(), &TruncationPolicy::default()).unwrap();
        let doubled = theta_char_at_radius(&tau, &z, &HalfCharacteristic::zero(g), &DirectionalJet::none(), 2.0 * d.radius as f64).unwrap();
        assert!((doubled - d.value).norm() <= d.error_bound);
    }
}

#[test]
fn divisor_point_genus_one() {
    let p = theta_divisor_point(&tau_i(), &[c(0.0, 0.0)], &[c(1.0, 0.0)], &TruncationPolicy::default()).unwrap();
    let tau = tau_i();
    let (r, _, _) = tau.reduce(&[p.z[0] - c(0.5, 0.5)]);
    let frac = r[0];
    let near = |x: f64| (x - x.round()).abs() < 1e-8;
    assert!(near(frac.re) && near(frac.im), "{:?}", p.z);
    assert!(p.residual < 1e-10 * p.scale);
    assert!(p.derivative > 1e-3);
}

#[test]
fn divisor_point_genus_two() {
    let mut rng = rng_from_seed(16);
    let tau = random_period_matrix(2, &mut rng);
    let base = random_cell_point(&tau, &mut rng);
    let dir = random_complex_vector(2, 1.0, &mut rng);
    let p = theta_divisor_point(&tau, &base, &dir, &TruncationPolicy::default()).unwrap();
    let v = theta_eval(&tau, &p.z, &DirectionalJet::none(), &TruncationPolicy::default()).unwrap();
    assert!(v.norm() < 1e-10 * p.scale);
}

#[test]
fn zero_direction_is_rejected() {
    assert!(theta_divisor_point(&tau_i(), &[c(0.0, 0.0)], &[c(0.0, 0.0)], &TruncationPolicy::default()).is_err());
}

#[test]
fn jet_order_cap() {
    let d = vec![c(1.0, 0.0)];
    assert!(DirectionalJet::new(vec![(d.clone(), 4), (d, 3)]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quasi_periodicity(seed in 0u64..10_000, g in 1usize..=3, m1 in proptest::collection::vec(-3i64..=3, 3), m2 in proptest::collection::vec(-2i64..=2, 3)) {
        let mut rng = rng_from_seed(seed);
        let tau = random_period_matrix(g, &mut rng);
        let z = random_cell_point(&tau, &mut rng);
        let (m1, m2) = (&m1[..g], &m2[..g]);
        let lam = tau.lattice_vector(m1, m2);
        let zl: Vec<C64> = z.iter().zip(&lam).map(|(a, b)| a + b).collect();
        let policy = TruncationPolicy::default();
        let lhs = theta_eval(&tau, &zl, &DirectionalJet::none(), &policy).unwrap();
        let t0 = theta_eval(&tau, &z, &DirectionalJet::none(), &policy).unwrap();
        let m2f: Vec<f64> = m2.iter().map(|&x| x as f64).collect();
        let tm = tau.apply_real(&m2f);
        let mut e = C64::new(0.0, 0.0);
        for i in 0..g {
            e += -2.0 * m2f[i] * z[i] - m2f[i] * tm[i];
        }
        let rhs = (C64::new(0.0, PI) * e).exp() * t0;
        // normalized by the largest participating term
        let norm = lhs.norm().max(rhs.norm()).max(1.0);
        prop_assert!((lhs - rhs).norm() / norm < 1e-9, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn parity(seed in 0u64..10_000, g in 1usize..=3) {
        let mut rng = rng_from_seed(seed);
        let tau = random_period_matrix(g, &mut rng);
        let z = random_cell_point(&tau, &mut rng);
        let mz: Vec<C64> = z.iter().map(|x| -x).collect();
        let policy = TruncationPolicy::default();
        let a = theta_eval(&tau, &z, &DirectionalJet::none(), &policy).unwrap();
        let b = theta_eval(&tau, &mz, &DirectionalJet::none(), &policy).unwrap();
        prop_assert!((a - b).norm() <= 1e-11 * a.norm().max(1.0));
    }

    #[test]
    fn derivative_matches_central_difference(seed in 0u64..10_000, g in 1usize..=3) {
        let mut rng = rng_from_seed(seed);
        let tau = random_period_matrix(g, &mut rng);
        let z = random_cell_point(&tau, &mut rng);
        let d = random_complex_vector(g, 1.0, &mut rng);
        let policy = TruncationPolicy::default();
        let h = 1e-5;
        let shift = |s: f64| -> Vec<C64> { z.iter().zip(&d).map(|(a, b)| a + b * s).collect() };
        let f = |w: &[C64]| theta_eval(&tau, w, &DirectionalJet::none(), &policy).unwrap();
        let fd = (f(&shift(h)) - f(&shift(-h))) / (2.0 * h);
        let an = theta_eval(&tau, &z, &DirectionalJet::along(&d, 1), &policy).unwrap();
        let scale = an.norm().max(f(&z).norm());
        prop_assert!((fd - an).norm() <= 1e-6 * scale, "{} vs {}", fd, an);
    }
}
