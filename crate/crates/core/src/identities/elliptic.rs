use super::report::ResidualReport;
use crate::error::{Error, Result};
use crate::theta::{theta_char, DirectionalJet, HalfCharacteristic, PeriodMatrix, TruncationPolicy};
use crate::C64;

pub const ELLIPTIC_TOLERANCE: f64 = 1e-9;

/// `f(z) = Π θ[½;½](τ, xᵢ − z)^{mᵢ}` on a genus-1 torus.
#[derive(Clone, Debug)]
pub struct EllipticFunction {
    tau: PeriodMatrix,
    divisor: Vec<(C64, i64)>,
    policy: TruncationPolicy,
}

impl EllipticFunction {
    pub fn eval(&self, z: C64) -> Result<C64> {
        let chi = HalfCharacteristic::new(&[0.5], &[0.5])?;
        let mut f = C64::new(1.0, 0.0);
        for &(x, m) in &self.divisor {
            let t = theta_char(&self.tau, &[x - z], &chi, &DirectionalJet::none(), &self.policy)?;
            f *= t.powi(m as i32);
        }
        Ok(f)
    }

    pub fn divisor(&self) -> &[(C64, i64)] {
        &self.divisor
    }

    /// Max of `|f(z+1)/f(z) − 1|` and `|f(z+τ)/f(z) − 1|` over `samples`.
    pub fn periodicity(&self, samples: &[C64]) -> Result<ResidualReport> {
        let tau = self.tau.entry(0, 0);
        let mut worst: f64 = 0.0;
        for &z in samples {
            let f0 = self.eval(z)?;
            for shift in [C64::new(1.0, 0.0), tau] {
                let f1 = self.eval(z + shift)?;
                worst = worst.max((f1 / f0 - 1.0).norm());
            }
        }
        Ok(ResidualReport::below("elliptic-function", "", worst, 1.0, ELLIPTIC_TOLERANCE)
            .with_param("degree", self.divisor.len()))
    }
}

/// Elliptic function with prescribed divisor; requires `Σ mᵢ = 0`.
/// Double periodicity additionally needs `Σ mᵢ xᵢ ∈ Z + τZ`, which the
/// periodicity report measures.
pub fn elliptic_function_from_divisor(
    tau: &PeriodMatrix,
    divisor: &[(C64, i64)],
    policy: &TruncationPolicy,
) -> Result<EllipticFunction> {
    if tau.genus() != 1 {
        return Err(Error::WrongGenus { expected: 1, got: tau.genus() });
    }
    let degree: i64 = divisor.iter().map(|(_, m)| m).sum();
    if degree != 0 {
        return Err(Error::DegreeMismatch { degree });
    }
    Ok(EllipticFunction { tau: tau.clone(), divisor: divisor.to_vec(), policy: *policy })
}
