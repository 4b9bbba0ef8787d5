use super::report::{relative, ResidualReport};
use crate::error::{Error, Result};
use crate::linalg::norm;
use crate::theta::{theta_jets, DirectionalJet, PeriodMatrix, TruncationPolicy, DIVISOR_TOLERANCE};
use crate::C64;

pub const SURFACE_TOLERANCE: f64 = 1e-8;

/// Which form of the quartic identity on the theta divisor to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurfaceForm {
    /// `−a₂B² + 2a₁BC − a₁²B₂ + (a₁²a₄ − 2a₁a₂a₃ + a₂³)`, with
    /// `a_k = D₁^kθ`, `B = D₂θ`, `C = D₁D₂θ`, `B₂ = D₂²θ`.
    Corrected,
    /// `(B² − 2a₂²)a₂ − 2(a₂a₃ + BC)a₁ + (B₂ − 2a₄)a₁²`.
    Printed,
}

impl SurfaceForm {
    pub fn name(self) -> &'static str {
        match self {
            SurfaceForm::Corrected => "corrected",
            SurfaceForm::Printed => "printed",
        }
    }
}

/// Derivatives of `θ` at a point along `D₁ = ∂_U` and `D₂ = ∂_V`.
#[derive(Clone, Copy, Debug)]
pub struct SurfaceJet {
    pub theta: C64,
    /// `a[k] = D₁^k θ`, `k = 0..=4`.
    pub a: [C64; 5],
    pub b: C64,
    pub c: C64,
    pub b2: C64,
}

impl SurfaceJet {
    pub fn at(tau: &PeriodMatrix, z: &[C64], u: &[C64], v: &[C64], policy: &TruncationPolicy) -> Result<SurfaceJet> {
        let jets = [
            DirectionalJet::none(),
            DirectionalJet::along(u, 1),
            DirectionalJet::along(u, 2),
            DirectionalJet::along(u, 3),
            DirectionalJet::along(u, 4),
            DirectionalJet::along(v, 1),
            DirectionalJet::along(u, 1).then(v, 1)?,
            DirectionalJet::along(v, 2),
        ];
        let r = theta_jets(tau, z, &jets, policy)?;
        Ok(SurfaceJet { theta: r[0], a: [r[0], r[1], r[2], r[3], r[4]], b: r[5], c: r[6], b2: r[7] })
    }

    /// Monomials of the chosen form; their sum is the identity's left side.
    pub fn monomials(&self, form: SurfaceForm) -> Vec<C64> {
        let [_, a1, a2, a3, a4] = self.a;
        let (b, c, b2) = (self.b, self.c, self.b2);
        match form {
            SurfaceForm::Corrected => vec![
                -a2 * b * b,
                a1 * b * c * 2.0,
                -a1 * a1 * b2,
                a1 * a1 * a4,
                -a1 * a2 * a3 * 2.0,
                a2 * a2 * a2,
            ],
            SurfaceForm::Printed => vec![
                b * b * a2,
                -a2 * a2 * a2 * 2.0,
                -a2 * a3 * a1 * 2.0,
                -b * c * a1 * 2.0,
                b2 * a1 * a1,
                -a4 * a1 * a1 * 2.0,
            ],
        }
    }

    /// `(sum, normalized residual, normalizer)`.
    pub fn residual(&self, form: SurfaceForm) -> (C64, f64, f64) {
        let m = self.monomials(form);
        let sum: C64 = m.iter().sum();
        let mags: Vec<f64> = m.iter().map(|x| x.norm()).collect();
        let (r, n) = relative(sum.norm(), &mags);
        (sum, r, n)
    }
}

/// Local `|θ|` scale near `z`: max over the unit segment along `U/|U|`.
pub fn local_scale(tau: &PeriodMatrix, z: &[C64], u: &[C64], policy: &TruncationPolicy) -> Result<f64> {
    let n = norm(u);
    if n == 0.0 {
        return Err(Error::DegenerateQuery("U must be nonzero".into()));
    }
    let dir: Vec<C64> = u.iter().map(|x| x / n).collect();
    crate::theta::segment_scale(tau, z, &dir, policy)
}

/// Quartic identity on the theta divisor at `z0` with `D₁ = ∂_U`, `D₂ = ∂_V`,
/// normalized by the largest monomial.
pub fn theta_surface_residual(
    tau: &PeriodMatrix,
    u: &[C64],
    v: &[C64],
    z0: &[C64],
    form: SurfaceForm,
    policy: &TruncationPolicy,
) -> Result<ResidualReport> {
    let g = tau.genus();
    for x in [u, v, z0] {
        if x.len() != g {
            return Err(Error::DimensionMismatch { expected: g, got: x.len() });
        }
    }
    let jet = SurfaceJet::at(tau, z0, u, v, policy)?;
    let scale = local_scale(tau, z0, u, policy)?;
    if jet.theta.norm() >= DIVISOR_TOLERANCE * scale {
        return Err(Error::NotOnDivisor { value: jet.theta.norm(), scale });
    }
    let (_, residual, normalizer) = jet.residual(form);
    Ok(ResidualReport::below("theta-surface", "", residual, normalizer, SURFACE_TOLERANCE).with_param("form", form.name()))
}
