use std::f64::consts::PI;

use super::report::{relative, ResidualReport};
use crate::error::Result;
use crate::theta::{kummer_vector, theta_jets, DirectionalJet, PeriodMatrix, TruncationPolicy};
use crate::C64;

pub const UNIVERSAL_TOLERANCE: f64 = 1e-9;

/// `θ(x+y)θ(x−y) = Σ_ε Θ[ε](x)Θ[ε](y)`.
pub fn addition_residual(
    tau: &PeriodMatrix,
    x: &[C64],
    y: &[C64],
    policy: &TruncationPolicy,
) -> Result<ResidualReport> {
    let plus: Vec<C64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
    let minus: Vec<C64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let none = [DirectionalJet::none()];
    let lhs = theta_jets(tau, &plus, &none, policy)?[0] * theta_jets(tau, &minus, &none, policy)?[0];
    let kx = kummer_vector(tau, x, &DirectionalJet::none(), policy)?;
    let ky = kummer_vector(tau, y, &DirectionalJet::none(), policy)?;
    let prods: Vec<C64> = kx.iter().zip(&ky).map(|(a, b)| a * b).collect();
    let rhs: C64 = prods.iter().sum();
    let mut terms: Vec<f64> = prods.iter().map(|p| p.norm()).collect();
    terms.push(lhs.norm());
    let (res, norm) = relative((lhs - rhs).norm(), &terms);
    Ok(ResidualReport::below("addition", "", res, norm, UNIVERSAL_TOLERANCE))
}

/// `θ(z + m₁ + τm₂) = exp(πi(−2m₂ᵗz − m₂ᵗτm₂)) θ(z)`.
pub fn quasiperiodicity_residual(
    tau: &PeriodMatrix,
    z: &[C64],
    m1: &[i64],
    m2: &[i64],
    policy: &TruncationPolicy,
) -> Result<ResidualReport> {
    let g = tau.genus();
    let lam = tau.lattice_vector(m1, m2);
    let zl: Vec<C64> = z.iter().zip(&lam).map(|(a, b)| a + b).collect();
    let none = [DirectionalJet::none()];
    let lhs = theta_jets(tau, &zl, &none, policy)?[0];
    let t0 = theta_jets(tau, z, &none, policy)?[0];
    let m2f: Vec<f64> = m2.iter().map(|&k| k as f64).collect();
    let tm = tau.apply_real(&m2f);
    let e: C64 = (0..g).map(|i| -2.0 * m2f[i] * z[i] - m2f[i] * tm[i]).sum();
    let rhs = (C64::new(0.0, PI) * e).exp() * t0;
    let (res, norm) = relative((lhs - rhs).norm(), &[lhs.norm(), rhs.norm(), 1.0]);
    Ok(ResidualReport::below("quasiperiodicity", "", res, norm, UNIVERSAL_TOLERANCE))
}
