use std::f64::consts::PI;

use super::characteristic::{eps_from_index, HalfCharacteristic};
use super::jet::DirectionalJet;
use super::truncation::{base_radius, jet_radius, tail_bound, TruncationPolicy};
use super::PeriodMatrix;
use crate::error::{Error, Result};
use crate::C64;

const TWO_PI_I: C64 = C64::new(0.0, 2.0 * PI);

/// Lattice points `m = n + ε` inside the truncation ellipsoid together with
/// the terms `exp(πi mᵗτm + 2πi mᵗw - S)`, `S = π bᵗ(Im τ)⁻¹b`, `b = Im w`.
pub(crate) struct LatticeTerms {
    g: usize,
    ms: Vec<f64>,
    terms: Vec<C64>,
    log_scale: f64,
    centre_norm: f64,
}

impl LatticeTerms {
    pub(crate) fn new(tau: &PeriodMatrix, eps: &[f64], w: &[C64], radius: f64) -> Self {
        let g = tau.genus();
        let yinv = tau.imag_inverse();
        let b: Vec<f64> = w.iter().map(|x| x.im).collect();
        // saddle of -π mᵗYm - 2π mᵗb in the m variable
        let c: Vec<f64> = (0..g)
            .map(|i| -(0..g).map(|j| yinv[i * g + j] * b[j]).sum::<f64>())
            .collect();
        let log_scale = -PI * (0..g).map(|i| c[i] * b[i]).sum::<f64>();
        // v = m - c = n - shift with shift = c - ε
        let shift: Vec<f64> = (0..g).map(|i| c[i] - eps[i]).collect();
        let r = tau.cholesky_upper();
        let mut ms = Vec::new();
        let mut n = vec![0i64; g];
        enumerate(g, r, &shift, radius * radius, g, 0.0, &mut n, &mut ms);
        for m in ms.chunks_mut(g) {
            for (x, e) in m.iter_mut().zip(eps) {
                *x += e;
            }
        }
        let mut terms = Vec::with_capacity(ms.len() / g);
        for m in ms.chunks(g) {
            let mut e = C64::new(0.0, 0.0);
            for i in 0..g {
                let mut tm = C64::new(0.0, 0.0);
                for j in 0..g {
                    tm += tau.entry(i, j) * m[j];
                }
                e += m[i] * (tm + 2.0 * w[i]);
            }
            let expo = C64::new(0.0, PI) * e - log_scale;
            terms.push(expo.exp());
        }
        let centre_norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        LatticeTerms { g, ms, terms, log_scale, centre_norm }
    }

    pub(crate) fn scale(&self) -> f64 {
        self.log_scale.exp()
    }

    fn points(&self) -> impl Iterator<Item = (&[f64], &C64)> {
        self.ms.chunks(self.g).zip(self.terms.iter())
    }

    /// `2πi m·d` for every point.
    fn factors(&self, d: &[C64]) -> Vec<C64> {
        self.ms
            .chunks(self.g)
            .map(|m| TWO_PI_I * m.iter().zip(d).map(|(a, b)| b * *a).sum::<C64>())
            .collect()
    }

    pub(crate) fn jet(&self, jet: &DirectionalJet) -> C64 {
        let facs: Vec<(Vec<C64>, u32)> =
            jet.parts().iter().map(|(d, o)| (self.factors(d), *o)).collect();
        let mut acc = C64::new(0.0, 0.0);
        for (k, t) in self.terms.iter().enumerate() {
            let mut p = *t;
            for (f, o) in &facs {
                p *= f[k].powu(*o);
            }
            acc += p;
        }
        acc * self.scale()
    }

    /// Value, gradient, Hessian, `∇∂_Uθ` and `∂_U^kθ` (k = 0..4) in one pass.
    pub(crate) fn taylor(&self, u: &[C64]) -> ThetaTaylor {
        let g = self.g;
        let fu = self.factors(u);
        let mut out = ThetaTaylor {
            value: C64::new(0.0, 0.0),
            grad: vec![C64::new(0.0, 0.0); g],
            hess: vec![C64::new(0.0, 0.0); g * g],
            grad_u: vec![C64::new(0.0, 0.0); g],
            du: [C64::new(0.0, 0.0); 5],
        };
        for (k, (m, t)) in self.points().enumerate() {
            let f = fu[k];
            let mut p = *t;
            for j in 0..5 {
                out.du[j] += p;
                p *= f;
            }
            out.value += t;
            for a in 0..g {
                let ga = t * TWO_PI_I * m[a];
                out.grad[a] += ga;
                out.grad_u[a] += ga * f;
                for b in 0..g {
                    out.hess[a * g + b] += ga * TWO_PI_I * m[b];
                }
            }
        }
        let s = self.scale();
        out.value *= s;
        out.du.iter_mut().for_each(|x| *x *= s);
        out.grad.iter_mut().for_each(|x| *x *= s);
        out.grad_u.iter_mut().for_each(|x| *x *= s);
        out.hess.iter_mut().for_each(|x| *x *= s);
        out
    }
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    g: usize,
    r: &[f64],
    shift: &[f64],
    r2: f64,
    level: usize,
    partial: f64,
    n: &mut [i64],
    out: &mut Vec<f64>,
) {
    if level == 0 {
        out.extend(n.iter().map(|&k| k as f64));
        return;
    }
    let i = level - 1;
    // row i of R applied to v = n - shift, using the already fixed n_j, j > i
    let mut s = 0.0;
    for j in i + 1..g {
        s += r[i * g + j] * (n[j] as f64 - shift[j]);
    }
    let rem = r2 - partial;
    if rem < 0.0 {
        return;
    }
    let rad = rem.sqrt();
    let rii = r[i * g + i];
    let lo = ((-rad - s) / rii + shift[i]).ceil() as i64;
    let hi = ((rad - s) / rii + shift[i]).floor() as i64;
    for k in lo..=hi {
        n[i] = k;
        let row = rii * (k as f64 - shift[i]) + s;
        enumerate(g, r, shift, r2, i, partial + row * row, n, out);
    }
}

/// Per-point derivative data used by the Hirota and surface checks.
#[derive(Clone, Debug)]
pub struct ThetaTaylor {
    pub value: C64,
    pub grad: Vec<C64>,
    /// Row-major `g×g` Hessian.
    pub hess: Vec<C64>,
    /// Gradient of `∂_Uθ`.
    pub grad_u: Vec<C64>,
    /// `∂_U^k θ` for `k = 0..=4`.
    pub du: [C64; 5],
}

impl ThetaTaylor {
    pub fn along(&self, d: &[C64]) -> C64 {
        self.grad.iter().zip(d).map(|(a, b)| a * b).sum()
    }

    pub fn second(&self, d: &[C64], e: &[C64]) -> C64 {
        let g = d.len();
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..g {
            for b in 0..g {
                acc += d[a] * self.hess[a * g + b] * e[b];
            }
        }
        acc
    }

    /// `∂_U ∂_d θ`.
    pub fn mixed_u(&self, d: &[C64]) -> C64 {
        self.grad_u.iter().zip(d).map(|(a, b)| a * b).sum()
    }
}

/// A theta value with its truncation data.
#[derive(Clone, Copy, Debug)]
pub struct ThetaValue {
    pub value: C64,
    pub radius: u32,
    /// Tail bound times the saddle scale, times a crude bound of the
    /// derivative prefactors at the truncation boundary.
    pub error_bound: f64,
}

fn check_dim(tau: &PeriodMatrix, z: &[C64]) -> Result<()> {
    if z.len() != tau.genus() {
        return Err(Error::DimensionMismatch { expected: tau.genus(), got: z.len() });
    }
    Ok(())
}

fn raw_terms(tau: &PeriodMatrix, eps: &[f64], w: &[C64], radius: u32) -> LatticeTerms {
    LatticeTerms::new(tau, eps, w, radius as f64)
}

fn char_terms(
    tau: &PeriodMatrix,
    z: &[C64],
    eps: &[f64],
    delta: &[f64],
    order: u32,
    policy: &TruncationPolicy,
) -> Result<(LatticeTerms, u32)> {
    check_dim(tau, z)?;
    let base = base_radius(tau, policy)?;
    let radius = jet_radius(base, order);
    if radius > policy.max_radius {
        return Err(Error::RadiusCapExceeded { needed: radius, cap: policy.max_radius });
    }
    let w: Vec<C64> = z.iter().zip(delta).map(|(a, d)| a + d).collect();
    Ok((raw_terms(tau, eps, &w, radius), radius))
}

fn detailed(
    tau: &PeriodMatrix,
    terms: &LatticeTerms,
    radius: u32,
    jet: &DirectionalJet,
) -> ThetaValue {
    let value = terms.jet(jet);
    let reach = 2.0 * radius as f64 / tau.lambda_min().sqrt() + terms.centre_norm + 1.0;
    let pref: f64 = jet
        .parts()
        .iter()
        .map(|(d, o)| {
            let dn = d.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            (2.0 * PI * dn * reach).powi(*o as i32)
        })
        .product();
    ThetaValue { value, radius, error_bound: tail_bound(tau, radius as f64) * terms.scale() * pref.max(1.0) }
}

/// `θ(τ, z)` or a directional derivative of it.
pub fn theta_eval(tau: &PeriodMatrix, z: &[C64], jet: &DirectionalJet, policy: &TruncationPolicy) -> Result<C64> {
    Ok(theta_eval_detailed(tau, z, jet, policy)?.value)
}

pub fn theta_eval_detailed(
    tau: &PeriodMatrix,
    z: &[C64],
    jet: &DirectionalJet,
    policy: &TruncationPolicy,
) -> Result<ThetaValue> {
    theta_char_detailed(tau, z, &HalfCharacteristic::zero(tau.genus()), jet, policy)
}

/// `θ[ε;δ](τ, z) = Σ exp(πi (n+ε)ᵗ(τ(n+ε) + 2(z+δ)))` or a directional derivative.
pub fn theta_char(
    tau: &PeriodMatrix,
    z: &[C64],
    chi: &HalfCharacteristic,
    jet: &DirectionalJet,
    policy: &TruncationPolicy,
) -> Result<C64> {
    Ok(theta_char_detailed(tau, z, chi, jet, policy)?.value)
}

pub fn theta_char_detailed(
    tau: &PeriodMatrix,
    z: &[C64],
    chi: &HalfCharacteristic,
    jet: &DirectionalJet,
    policy: &TruncationPolicy,
) -> Result<ThetaValue> {
    if chi.genus() != tau.genus() {
        return Err(Error::DimensionMismatch { expected: tau.genus(), got: chi.genus() });
    }
    jet.check_dimension(tau.genus())?;
    let (terms, radius) = char_terms(tau, z, &chi.eps(), &chi.delta(), jet.order(), policy)?;
    Ok(detailed(tau, &terms, radius, jet))
}

/// Several jets of `θ[ε;δ]` at one point, sharing one lattice pass.
pub fn theta_char_jets(
    tau: &PeriodMatrix,
    z: &[C64],
    chi: &HalfCharacteristic,
    jets: &[DirectionalJet],
    policy: &TruncationPolicy,
) -> Result<Vec<C64>> {
    for j in jets {
        j.check_dimension(tau.genus())?;
    }
    let order = jets.iter().map(|j| j.order()).max().unwrap_or(0);
    let (terms, _) = char_terms(tau, z, &chi.eps(), &chi.delta(), order, policy)?;
    Ok(jets.iter().map(|j| terms.jet(j)).collect())
}

/// Several jets of `θ(τ, z)`.
pub fn theta_jets(
    tau: &PeriodMatrix,
    z: &[C64],
    jets: &[DirectionalJet],
    policy: &TruncationPolicy,
) -> Result<Vec<C64>> {
    theta_char_jets(tau, z, &HalfCharacteristic::zero(tau.genus()), jets, policy)
}

/// Value and derivative data along `u` at `z` (orders up to four).
pub fn theta_taylor(tau: &PeriodMatrix, z: &[C64], u: &[C64], policy: &TruncationPolicy) -> Result<ThetaTaylor> {
    if u.len() != tau.genus() {
        return Err(Error::DimensionMismatch { expected: tau.genus(), got: u.len() });
    }
    let g = tau.genus();
    let (terms, _) = char_terms(tau, z, &vec![0.0; g], &vec![0.0; g], 4, policy)?;
    Ok(terms.taylor(u))
}

/// Second-order theta `Θ[ε](τ, z) = θ[ε;0](2τ, 2z)`.
///
/// Jet directions refer to the `z` argument of `Θ`; every derivative order
/// therefore carries the chain-rule factor 2, applied here by doubling the
/// directions before differentiating `θ[ε;0](2τ, ·)`.
pub fn theta_second_order(
    tau: &PeriodMatrix,
    z: &[C64],
    eps: &[f64],
    jet: &DirectionalJet,
    policy: &TruncationPolicy,
) -> Result<C64> {
    let tau2 = tau.scaled(2.0);
    second_order_with(&tau2, z, eps, std::slice::from_ref(jet), policy).map(|v| v[0])
}

fn second_order_with(
    tau2: &PeriodMatrix,
    z: &[C64],
    eps: &[f64],
    jets: &[DirectionalJet],
    policy: &TruncationPolicy,
) -> Result<Vec<C64>> {
    let g = tau2.genus();
    if eps.len() != g {
        return Err(Error::DimensionMismatch { expected: g, got: eps.len() });
    }
    if eps.iter().any(|&e| e != 0.0 && e != 0.5) {
        return Err(Error::InvalidCharacteristic);
    }
    let chi = HalfCharacteristic::new(eps, &vec![0.0; g])?;
    let z2: Vec<C64> = z.iter().map(|x| x * 2.0).collect();
    let scaled: Vec<DirectionalJet> = jets.iter().map(|j| j.scaled(2.0)).collect();
    theta_char_jets(tau2, &z2, &chi, &scaled, policy)
}

/// Kummer vector `(Θ[ε](τ, z))_ε`, components in binary order of `ε`
/// with `ε_1` least significant.
pub fn kummer_vector(
    tau: &PeriodMatrix,
    z: &[C64],
    jet: &DirectionalJet,
    policy: &TruncationPolicy,
) -> Result<Vec<C64>> {
    Ok(kummer_vector_jets(tau, z, std::slice::from_ref(jet), policy)?.remove(0))
}

/// Several jets of the Kummer vector; result is indexed `[jet][component]`.
pub fn kummer_vector_jets(
    tau: &PeriodMatrix,
    z: &[C64],
    jets: &[DirectionalJet],
    policy: &TruncationPolicy,
) -> Result<Vec<Vec<C64>>> {
    let g = tau.genus();
    check_dim(tau, z)?;
    let tau2 = tau.scaled(2.0);
    let mut out = vec![Vec::with_capacity(1 << g); jets.len()];
    for idx in 0..1usize << g {
        let vals = second_order_with(&tau2, z, &eps_from_index(g, idx), jets, policy)?;
        for (o, v) in out.iter_mut().zip(vals) {
            o.push(v);
        }
    }
    Ok(out)
}

/// `θ[ε;δ]` summed over a fixed ellipsoid radius, bypassing the policy.
/// Used to audit the truncation bound.
pub fn theta_char_at_radius(
    tau: &PeriodMatrix,
    z: &[C64],
    chi: &HalfCharacteristic,
    jet: &DirectionalJet,
    radius: f64,
) -> Result<C64> {
    check_dim(tau, z)?;
    jet.check_dimension(tau.genus())?;
    let w: Vec<C64> = z.iter().zip(chi.delta()).map(|(a, d)| a + d).collect();
    Ok(LatticeTerms::new(tau, &chi.eps(), &w, radius).jet(jet))
}
