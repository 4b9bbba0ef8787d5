use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::CurveFixture;
use crate::cliio::random::rng_from_seed;
use crate::error::{Error, Result};
use crate::identities::ResidualReport;
use crate::linalg::least_squares;
use crate::theta::{theta_jets, DirectionalJet, TruncationPolicy};
use crate::C64;

pub const BA_TOLERANCE: f64 = 1e-6;
/// Step of the 5-point difference stencils.
pub const BA_STEP: f64 = 1.25e-4;
pub const BA_FIT_POINTS: usize = 8;
pub const BA_HELD_OUT: usize = 32;
/// Side of the collision-check grid laid over the window.
const GUARD_GRID: usize = 9;

/// Real sample box in the `(x, y)` plane; `seed` fixes the sample points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaWindow {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub seed: u64,
}

impl BaWindow {
    pub fn new(x: (f64, f64), y: (f64, f64), seed: u64) -> Self {
        BaWindow { x, y, seed }
    }

    fn sample(&self, n: usize, stream: u64) -> Vec<(f64, f64)> {
        let mut rng = rng_from_seed(self.seed.wrapping_mul(0x9e37_79b9).wrapping_add(stream));
        (0..n).map(|_| (rng.gen_range(self.x.0..=self.x.1), rng.gen_range(self.y.0..=self.y.1))).collect()
    }

    fn grid(&self) -> Vec<(f64, f64)> {
        let m = (GUARD_GRID - 1) as f64;
        let mut out = Vec::with_capacity(GUARD_GRID * GUARD_GRID);
        for i in 0..GUARD_GRID {
            for j in 0..GUARD_GRID {
                let x = self.x.0 + (self.x.1 - self.x.0) * i as f64 / m;
                let y = self.y.0 + (self.y.1 - self.y.0) * j as f64 / m;
                out.push((x, y));
            }
        }
        out
    }

    fn spacing(&self) -> f64 {
        let m = (GUARD_GRID - 1) as f64;
        ((self.x.1 - self.x.0) / m).hypot((self.y.1 - self.y.0) / m)
    }
}

/// Held-out residual of the BA equation with the fitted exponents.
#[derive(Clone, Debug)]
pub struct BaConsistency {
    pub report: ResidualReport,
    pub kappa: [C64; 2],
}

/// Theta quotient `φ = θ(A + U1x + U2y + Z)/θ(U1x + U2y + Z)` and the
/// potential `u = 2∂ₓ² ln θ(U1x + U2y + Z)` at the sample points.
struct Quotient<'a> {
    fixture: &'a CurveFixture,
    ap: &'a [C64],
    policy: &'a TruncationPolicy,
}

/// Derivatives of `φ` at one point plus the potential there.
struct Local {
    phi: C64,
    phi_x: C64,
    phi_xx: C64,
    phi_y: C64,
    u: C64,
}

impl Quotient<'_> {
    fn arg(&self, x: f64, y: f64) -> Vec<C64> {
        let f = self.fixture;
        (0..f.genus).map(|j| f.u1[j] * x + f.u2[j] * y + f.z[j]).collect()
    }

    fn theta(&self, z: &[C64]) -> Result<C64> {
        Ok(theta_jets(&self.fixture.tau, z, &[DirectionalJet::none()], self.policy)?[0])
    }

    fn phi(&self, x: f64, y: f64) -> Result<C64> {
        let z = self.arg(x, y);
        let za: Vec<C64> = z.iter().zip(self.ap).map(|(a, b)| a + b).collect();
        Ok(self.theta(&za)? / self.theta(&z)?)
    }

    /// `|θ|/|∂_{U1}θ|` for the denominator and numerator: a first-order
    /// estimate of the x-distance to the divisor.
    fn divisor_distance(&self, x: f64, y: f64) -> Result<f64> {
        let z = self.arg(x, y);
        let za: Vec<C64> = z.iter().zip(self.ap).map(|(a, b)| a + b).collect();
        let jets = [DirectionalJet::none(), DirectionalJet::along(&self.fixture.u1, 1)];
        let mut d = f64::INFINITY;
        for w in [&z, &za] {
            let v = theta_jets(&self.fixture.tau, w, &jets, self.policy)?;
            d = d.min(if v[1].norm() == 0.0 { if v[0].norm() == 0.0 { 0.0 } else { f64::INFINITY } } else { v[0].norm() / v[1].norm() });
        }
        Ok(d)
    }

    fn local(&self, x: f64, y: f64) -> Result<Local> {
        let h = BA_STEP;
        let mut px = [C64::new(0.0, 0.0); 5];
        let mut py = [C64::new(0.0, 0.0); 5];
        for k in 0..5 {
            let s = (k as f64 - 2.0) * h;
            px[k] = self.phi(x + s, y)?;
            py[k] = if k == 2 { px[2] } else { self.phi(x, y + s)? };
        }
        let d1 = |f: &[C64; 5]| (f[0] - f[1] * 8.0 + f[3] * 8.0 - f[4]) / (12.0 * h);
        let d2 = |f: &[C64; 5]| (-f[0] + f[1] * 16.0 - f[2] * 30.0 + f[3] * 16.0 - f[4]) / (12.0 * h * h);
        let u = ba_potential(self.fixture, x, y, self.policy)?;
        Ok(Local { phi: px[2], phi_x: d1(&px), phi_xx: d2(&px), phi_y: d1(&py), u })
    }
}

/// `u = 2∂ₓ² ln θ(U1x + U2y + Z)` from the analytic directional jets.
pub fn ba_potential(fixture: &CurveFixture, x: f64, y: f64, policy: &TruncationPolicy) -> Result<C64> {
    let z: Vec<C64> = (0..fixture.genus).map(|j| fixture.u1[j] * x + fixture.u2[j] * y + fixture.z[j]).collect();
    let u1 = &fixture.u1;
    let jets = [DirectionalJet::none(), DirectionalJet::along(u1, 1), DirectionalJet::along(u1, 2)];
    let t = theta_jets(&fixture.tau, &z, &jets, policy)?;
    Ok((t[0] * t[2] - t[1] * t[1]) * 2.0 / (t[0] * t[0]))
}

/// [`ba_consistency_at`] for a named point of the fixture.
pub fn ba_consistency(fixture: &CurveFixture, p: &str, window: &BaWindow, policy: &TruncationPolicy) -> Result<BaConsistency> {
    let ap = fixture.point(p)?.to_vec();
    ba_consistency_at(fixture, &ap, window, policy)
}

/// Fit `(κ₁, κ₂)` so that `ψ = φ·e^{κ₁x + κ₂y}` solves `(∂ₓ² + u)ψ = ∂_yψ`
/// on 8 window points, then report the residual on 32 held-out points
/// normalized by `max |∂_yψ|`, both taken after dividing out `e^{κ₁x + κ₂y}`.
/// Derivatives of `φ` are 5-point differences; the exponential factor is
/// differentiated exactly.
pub fn ba_consistency_at(
    fixture: &CurveFixture,
    ap: &[C64],
    window: &BaWindow,
    policy: &TruncationPolicy,
) -> Result<BaConsistency> {
    let g = fixture.genus;
    if ap.len() != g {
        return Err(Error::DimensionMismatch { expected: g, got: ap.len() });
    }
    if !(window.x.0 < window.x.1 && window.y.0 < window.y.1) {
        return Err(Error::InvalidArgument("window must have positive extent".into()));
    }
    let q = Quotient { fixture, ap, policy };
    let fit = window.sample(BA_FIT_POINTS, 0);
    let held = window.sample(BA_HELD_OUT, 1);
    let guard = (5.0 * BA_STEP).max(window.spacing());
    for &(x, y) in window.grid().iter().chain(&fit).chain(&held) {
        let d = q.divisor_distance(x, y)?;
        if d < guard {
            return Err(Error::DivisorCollision(format!(
                "theta zero within {d:e} of ({x}, {y}); guard distance {guard:e}"
            )));
        }
    }

    // 2κ₁φ_x + μφ = φ_y − φ_xx − uφ with μ = κ₁² − κ₂.
    let mut a = DMatrix::zeros(BA_FIT_POINTS, 2);
    let mut b = DVector::zeros(BA_FIT_POINTS);
    for (i, &(x, y)) in fit.iter().enumerate() {
        let l = q.local(x, y)?;
        let rhs = l.phi_y - l.phi_xx - l.u * l.phi;
        let s = [l.phi_x.norm(), l.phi.norm(), rhs.norm()].into_iter().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        a[(i, 0)] = l.phi_x * 2.0 / s;
        a[(i, 1)] = l.phi / s;
        b[i] = rhs / s;
    }
    let sol = least_squares(&a, &b).ok_or_else(|| Error::SingularSystem("BA exponent fit".into()))?;
    let k1 = sol[0];
    let k2 = k1 * k1 - sol[1];

    let mut worst: f64 = 0.0;
    let mut norm: f64 = 0.0;
    for &(x, y) in &held {
        let l = q.local(x, y)?;
        let lhs = l.phi_xx + l.phi_x * k1 * 2.0 + l.phi * (k1 * k1) + l.u * l.phi;
        let dy = l.phi_y + l.phi * k2;
        worst = worst.max((lhs - dy).norm());
        norm = norm.max(dy.norm());
    }
    let residual = if norm > 0.0 { worst / norm } else if worst == 0.0 { 0.0 } else { f64::INFINITY };
    let report = ResidualReport::below("ba-consistency", "", residual, norm, BA_TOLERANCE)
        .with_param("kappa1", crate::identities::fmt_c(k1))
        .with_param("kappa2", crate::identities::fmt_c(k2));
    Ok(BaConsistency { report, kappa: [k1, k2] })
}
