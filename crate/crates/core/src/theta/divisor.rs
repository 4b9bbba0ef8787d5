use super::eval::theta_jets;
use super::jet::DirectionalJet;
use super::truncation::TruncationPolicy;
use super::PeriodMatrix;
use crate::error::{Error, Result};
use crate::C64;

pub const NEWTON_STARTS: usize = 16;
pub const NEWTON_STEPS: usize = 64;
pub const DIVISOR_TOLERANCE: f64 = 1e-10;

/// A zero of `θ` on a complex line.
#[derive(Clone, Debug)]
pub struct DivisorPoint {
    pub z: Vec<C64>,
    /// Line parameter: `z = base + t·direction`.
    pub t: C64,
    /// `|θ(z)|`.
    pub residual: f64,
    /// Largest `|θ|` over the sample points of the unit segment.
    pub scale: f64,
    /// `|∂_direction θ(z)|`, the multiplicity-one certificate.
    pub derivative: f64,
}

/// Max `|θ|` at `n` equispaced points of `base + [0,1)·direction`.
pub fn segment_scale(
    tau: &PeriodMatrix,
    base: &[C64],
    direction: &[C64],
    policy: &TruncationPolicy,
) -> Result<f64> {
    let mut scale: f64 = 0.0;
    for k in 0..NEWTON_STARTS {
        let t = k as f64 / NEWTON_STARTS as f64;
        let z: Vec<C64> = base.iter().zip(direction).map(|(b, d)| b + d * t).collect();
        let v = theta_jets(tau, &z, &[DirectionalJet::none()], policy)?[0];
        scale = scale.max(v.norm());
    }
    Ok(scale)
}

/// Newton iteration for `t ↦ θ(base + t·direction)` from 16 equispaced starts
/// on `[0, 1)`; the first start that converges wins.
pub fn theta_divisor_point(
    tau: &PeriodMatrix,
    base: &[C64],
    direction: &[C64],
    policy: &TruncationPolicy,
) -> Result<DivisorPoint> {
    let g = tau.genus();
    if base.len() != g || direction.len() != g {
        return Err(Error::DimensionMismatch { expected: g, got: base.len().min(direction.len()) });
    }
    if direction.iter().all(|d| d.norm() == 0.0) {
        return Err(Error::DegenerateQuery("direction must be nonzero".into()));
    }
    let scale = segment_scale(tau, base, direction, policy)?;
    let jets = [DirectionalJet::none(), DirectionalJet::along(direction, 1)];
    let at = |t: C64| -> Vec<C64> { base.iter().zip(direction).map(|(b, d)| b + d * t).collect() };
    for k in 0..NEWTON_STARTS {
        let mut t = C64::new(k as f64 / NEWTON_STARTS as f64, 0.0);
        for _ in 0..NEWTON_STEPS {
            let v = theta_jets(tau, &at(t), &jets, policy)?;
            if v[1].norm() == 0.0 || !v[1].re.is_finite() {
                break;
            }
            let step = v[0] / v[1];
            t -= step;
            if t.norm() > 1e3 || !t.re.is_finite() {
                break;
            }
            if step.norm() <= 1e-15 * (1.0 + t.norm()) {
                break;
            }
        }
        if !(t.norm() <= 1e3) {
            continue;
        }
        let z = at(t);
        let v = theta_jets(tau, &z, &jets, policy)?;
        if v[0].norm() < DIVISOR_TOLERANCE * scale {
            return Ok(DivisorPoint { z, t, residual: v[0].norm(), scale, derivative: v[1].norm() });
        }
    }
    Err(Error::NoConvergence(format!(
        "no theta zero found on the line after {NEWTON_STARTS} starts x {NEWTON_STEPS} steps"
    )))
}
