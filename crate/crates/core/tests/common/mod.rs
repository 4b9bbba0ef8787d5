#![allow(dead_code)]

use std::f64::consts::PI;

use schottky_lab::C64;

/// Direct one-dimensional sum `Σ_{|n| ≤ 60} exp(πi(n+ε)²τ + 2πi(n+ε)(z+δ))`.
pub fn oracle_1d(tau: C64, z: C64, eps: f64, delta: f64) -> C64 {
    let i = C64::new(0.0, 1.0);
    (-60..=60)
        .map(|n| {
            let m = n as f64 + eps;
            (i * PI * m * m * tau + i * 2.0 * PI * m * (z + delta)).exp()
        })
        .sum()
}

/// `k`-th derivative in `z` of the one-dimensional sum.
pub fn oracle_1d_deriv(tau: C64, z: C64, eps: f64, delta: f64, k: i32) -> C64 {
    let i = C64::new(0.0, 1.0);
    (-60..=60)
        .map(|n| {
            let m = n as f64 + eps;
            (i * 2.0 * PI * m).powi(k) * (i * PI * m * m * tau + i * 2.0 * PI * m * (z + delta)).exp()
        })
        .sum()
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}
