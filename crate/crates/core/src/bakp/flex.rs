use crate::error::{Error, Result};
use crate::identities::{local_scale, ResidualReport, SurfaceForm, SurfaceJet, SURFACE_TOLERANCE};
use crate::linalg::norm;
use crate::theta::{theta_divisor_point, theta_jets, DirectionalJet, PeriodMatrix, TruncationPolicy, DIVISOR_TOLERANCE};
use crate::C64;

pub const FLEX_D_TOLERANCE: f64 = 1e-5;
pub const FLEX_NEWTON_STEPS: usize = 32;
/// `|D₁θ|/(scale·|U|)` below which the zero is treated as non-simple.
pub const SIMPLE_ZERO_GUARD: f64 = 1e-8;

/// One accepted point of the divisor track `θ(U x̃(y) + V y + Z) = 0`.
#[derive(Clone, Debug)]
pub struct TrackPoint {
    pub y: f64,
    pub x: C64,
    /// `|θ|` at the point and the segment scale it was accepted against.
    pub residual: f64,
    pub scale: f64,
    /// Coefficient of `σ = x − x̃` in `2∂ₓ² ln θ = −2/σ² + v + wσ + …`.
    pub w: C64,
}

#[derive(Clone, Debug)]
pub struct FlexTrack {
    pub points: Vec<TrackPoint>,
    /// `max |ẍ̃ + 2w|` with `ẍ̃` from the 5-point stencil in `y`; absolute.
    pub eq_d: ResidualReport,
    /// Largest normalized misfit of the quartic divisor identity along the track.
    pub eq_theta: ResidualReport,
}

fn line(u: &[C64], v: &[C64], z: &[C64], x: C64, y: f64) -> Vec<C64> {
    u.iter().zip(v).zip(z).map(|((a, b), c)| a * x + b * y + c).collect()
}

/// `w = (a₁²a₄ − 2a₁a₂a₃ + a₂³)/(2a₁³)` with `a_k = D₁^kθ` at a simple zero.
pub fn flex_w(a: &[C64; 5]) -> C64 {
    let [_, a1, a2, a3, a4] = *a;
    (a1 * a1 * a4 - a1 * a2 * a3 * 2.0 + a2 * a2 * a2) / (a1 * a1 * a1 * 2.0)
}

/// Track the zero `x̃(y)` of `θ(Ux + Vy + Z)` over `steps` equal steps of
/// `y_range` by tangent prediction and Newton correction, then evaluate
/// `ẍ̃ = −2w` and the quartic divisor identity along the track.
pub fn flex_track(
    tau: &PeriodMatrix,
    u: &[C64],
    v: &[C64],
    z: &[C64],
    y_range: (f64, f64),
    steps: usize,
    policy: &TruncationPolicy,
) -> Result<FlexTrack> {
    let g = tau.genus();
    for w in [u, v, z] {
        if w.len() != g {
            return Err(Error::DimensionMismatch { expected: g, got: w.len() });
        }
    }
    if steps < 4 {
        return Err(Error::InvalidArgument(format!("flex_track needs at least 4 steps, got {steps}")));
    }
    let h = (y_range.1 - y_range.0) / steps as f64;
    if !(h.is_finite() && h != 0.0) {
        return Err(Error::InvalidArgument("y_range must have nonzero finite length".into()));
    }
    let (y0, _) = y_range;
    let base: Vec<C64> = v.iter().zip(z).map(|(b, c)| b * y0 + c).collect();
    let un = norm(u);
    if un == 0.0 {
        return Err(Error::SeedNotFound("U must be nonzero".into()));
    }
    let dir: Vec<C64> = u.iter().map(|a| a / un).collect();
    let seed = theta_divisor_point(tau, &base, &dir, policy).map_err(|e| match e {
        Error::NoConvergence(m) | Error::DegenerateQuery(m) => Error::SeedNotFound(m),
        other => other,
    })?;

    let jets = [
        DirectionalJet::none(),
        DirectionalJet::along(u, 1),
        DirectionalJet::along(v, 1),
    ];
    let mut points: Vec<TrackPoint> = Vec::with_capacity(steps + 1);
    let mut x = seed.t / un;
    let mut slope = C64::new(0.0, 0.0);
    let mut t_worst: f64 = 0.0;
    let mut t_norm: f64 = 0.0;
    for k in 0..=steps {
        let y = y0 + h * k as f64;
        let scale = local_scale(tau, &line(u, v, z, x, y), u, policy)?;
        if k > 0 {
            x += slope * h;
        }
        for _ in 0..FLEX_NEWTON_STEPS {
            let r = theta_jets(tau, &line(u, v, z, x, y), &jets[..2], policy)?;
            if r[1].norm() < SIMPLE_ZERO_GUARD * scale * un || !r[1].re.is_finite() {
                return Err(Error::TrackLost { step: k, reason: format!("|D1 theta| = {:e} at y = {y}", r[1].norm()) });
            }
            let dx = r[0] / r[1];
            x -= dx;
            if dx.norm() <= 1e-15 * (1.0 + x.norm()) {
                break;
            }
        }
        let zk = line(u, v, z, x, y);
        let scale = local_scale(tau, &zk, u, policy)?;
        let r = theta_jets(tau, &zk, &jets, policy)?;
        if r[0].norm() >= DIVISOR_TOLERANCE * scale {
            return Err(Error::TrackLost {
                step: k,
                reason: format!("|theta| = {:e} above {DIVISOR_TOLERANCE:e} x scale {scale:e}", r[0].norm()),
            });
        }
        slope = -r[2] / r[1];
        let jet = SurfaceJet::at(tau, &zk, u, v, policy)?;
        let (_, tr, tn) = jet.residual(SurfaceForm::Corrected);
        if tr > t_worst || t_norm == 0.0 {
            t_norm = tn;
        }
        t_worst = t_worst.max(tr);
        points.push(TrackPoint { y, x, residual: r[0].norm(), scale, w: flex_w(&jet.a) });
    }

    let mut d_worst: f64 = 0.0;
    let mut d_norm: f64 = 0.0;
    for k in 2..=steps - 2 {
        let p = |j: usize| points[j].x;
        let xdd = (-p(k - 2) + p(k - 1) * 16.0 - p(k) * 30.0 + p(k + 1) * 16.0 - p(k + 2)) / (12.0 * h * h);
        let w2 = points[k].w * 2.0;
        d_worst = d_worst.max((xdd + w2).norm());
        d_norm = d_norm.max(xdd.norm()).max(w2.norm());
    }
    let eq_d = ResidualReport::below("flex-eqD", "", d_worst, d_norm, FLEX_D_TOLERANCE);

    let eq_theta = ResidualReport::below("flex-eqTheta", "", t_worst, t_norm, SURFACE_TOLERANCE);
    Ok(FlexTrack { points, eq_d, eq_theta })
}
