use super::report::{fmt_c, ResidualReport};
use crate::error::{Error, Result};
use crate::theta::{even_characteristics, theta_char, DirectionalJet, PeriodMatrix, TruncationPolicy};
use crate::C64;

pub const SCHOTTKY_TOLERANCE: f64 = 1e-8;

/// Schottky–Igusa value with its normalized report.
#[derive(Clone, Debug)]
pub struct SchottkyReport {
    pub report: ResidualReport,
    /// `S(τ) = 2⁴ Σ θ¹⁶[ε;δ](τ,0) − (Σ θ⁸[ε;δ](τ,0))²` over even characteristics.
    pub value: C64,
}

/// Genus-4 Schottky–Igusa form, normalized by `|(Σ θ⁸)²|`.
pub fn schottky_igusa(tau: &PeriodMatrix, policy: &TruncationPolicy) -> Result<SchottkyReport> {
    if tau.genus() != 4 {
        return Err(Error::WrongGenus { expected: 4, got: tau.genus() });
    }
    let z = vec![C64::new(0.0, 0.0); 4];
    let none = DirectionalJet::none();
    let mut s8 = C64::new(0.0, 0.0);
    let mut s16 = C64::new(0.0, 0.0);
    for chi in even_characteristics(4) {
        let t = theta_char(tau, &z, &chi, &none, policy)?;
        let t8 = t.powi(8);
        s8 += t8;
        s16 += t8 * t8;
    }
    let sq = s8 * s8;
    let value = s16 * 16.0 - sq;
    let norm = sq.norm();
    let residual = if norm > 0.0 { value.norm() / norm } else { value.norm() };
    let report = ResidualReport::below("schottky-igusa", "", residual, norm, SCHOTTKY_TOLERANCE)
        .with_param("value", fmt_c(value));
    Ok(SchottkyReport { report, value })
}
