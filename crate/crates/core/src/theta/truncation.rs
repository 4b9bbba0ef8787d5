use statrs::function::gamma::{gamma, gamma_ur};

use super::PeriodMatrix;
use crate::error::{Error, Result};
use crate::C64;

/// Error control for the lattice sums.
///
/// `target_abs_error` bounds the neglected tail of the sum after the common
/// factor `exp(π bᵗ (Im τ)⁻¹ b)`, `b = Im z`, has been divided out; for `z`
/// in the fundamental cell that factor is of order one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationPolicy {
    pub target_abs_error: f64,
    pub max_radius: u32,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { target_abs_error: 1e-12, max_radius: 40 }
    }
}

impl TruncationPolicy {
    pub fn new(target_abs_error: f64, max_radius: u32) -> Result<Self> {
        if !(target_abs_error > 0.0) || !target_abs_error.is_finite() {
            return Err(Error::InvalidPolicy(format!("target_abs_error must be positive, got {target_abs_error}")));
        }
        if max_radius == 0 {
            return Err(Error::InvalidPolicy("max_radius must be positive".into()));
        }
        Ok(TruncationPolicy { target_abs_error, max_radius })
    }

    pub fn with_tolerance(tol: f64) -> Self {
        TruncationPolicy { target_abs_error: tol, ..Default::default() }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn upper_gamma(s: f64, x: f64) -> f64 {
    gamma_ur(s, x) * gamma(s)
}

/// Upper bound for `Σ exp(-π Q(n - c))` over lattice points outside the
/// ellipsoid `Q(n - c) ≤ R²`, `Q(v) = vᵗ Im τ v`, uniformly in the centre `c`.
///
/// Points of `Z^g` inside the Q-ball of radius `r` number at most
/// `V_g (r + δ)^g / √det Im τ` with `δ = √(g λ_max)/2`; integrating the
/// Gaussian against that count gives
/// `V_g/√det · Σ_k C(g,k) δ^{g-k} π^{-k/2} Γ(k/2 + 1, π R²)`.
pub fn tail_bound(tau: &PeriodMatrix, radius: f64) -> f64 {
    let g = tau.genus();
    let gf = g as f64;
    let vol = std::f64::consts::PI.powf(gf / 2.0) / gamma(gf / 2.0 + 1.0);
    let delta = (gf * tau.lambda_max()).sqrt() / 2.0;
    let x = std::f64::consts::PI * radius * radius;
    let sum: f64 = (0..=g)
        .map(|k| {
            let kf = k as f64;
            binomial(g, k)
                * delta.powi((g - k) as i32)
                * std::f64::consts::PI.powf(-kf / 2.0)
                * upper_gamma(kf / 2.0 + 1.0, x)
        })
        .sum();
    vol / tau.det_imag().sqrt() * sum
}

/// Smallest integer radius whose [`tail_bound`] is within the policy.
///
/// The bound does not depend on `z`: the summation is recentred at the real
/// saddle `-(Im τ)⁻¹ Im z`, which removes the `z` dependence.
pub fn truncation_radius(tau: &PeriodMatrix, z: &[C64], policy: &TruncationPolicy) -> Result<u32> {
    if z.len() != tau.genus() {
        return Err(Error::DimensionMismatch { expected: tau.genus(), got: z.len() });
    }
    base_radius(tau, policy)
}

pub(crate) fn base_radius(tau: &PeriodMatrix, policy: &TruncationPolicy) -> Result<u32> {
    for r in 1..=policy.max_radius {
        if tail_bound(tau, r as f64) <= policy.target_abs_error {
            return Ok(r);
        }
    }
    let mut r = policy.max_radius;
    while tail_bound(tau, r as f64) > policy.target_abs_error && r < 100_000 {
        r *= 2;
    }
    Err(Error::RadiusCapExceeded { needed: r, cap: policy.max_radius })
}

/// Radius used for a derivative of total order `order`.
pub(crate) fn jet_radius(base: u32, order: u32) -> u32 {
    if order == 0 {
        base
    } else {
        base + order.div_ceil(2) + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tau_i() -> PeriodMatrix {
        PeriodMatrix::diagonal(&[C64::new(0.0, 1.0)]).unwrap()
    }

    #[test]
    fn radius_for_tau_i_at_1e15_is_four() {
        let p = TruncationPolicy::new(1e-15, 40).unwrap();
        assert_eq!(truncation_radius(&tau_i(), &[C64::new(0.0, 0.0)], &p).unwrap(), 4);
    }

    #[test]
    fn hand_bound_genus_one() {
        // g = 1, τ = i: 2(1/2 + R) e^{-πR²}
        for r in [2.0, 3.0, 4.0] {
            let hand = 2.0 * (0.5 * (-std::f64::consts::PI * r * r).exp())
                + 2.0 * upper_gamma(1.5, std::f64::consts::PI * r * r) / std::f64::consts::PI.sqrt();
            assert!((tail_bound(&tau_i(), r) / hand - 1.0).abs() < 1e-12);
            assert!(tail_bound(&tau_i(), r) > 2.0 * (-std::f64::consts::PI * (r + 1.0).powi(2)).exp());
        }
    }

    #[test]
    fn cap_is_enforced() {
        let p = TruncationPolicy::new(1e-300, 2).unwrap();
        assert!(matches!(base_radius(&tau_i(), &p), Err(Error::RadiusCapExceeded { .. })));
    }

    #[test]
    fn invalid_policies() {
        assert!(TruncationPolicy::new(0.0, 10).is_err());
        assert!(TruncationPolicy::new(1e-3, 0).is_err());
    }
}
