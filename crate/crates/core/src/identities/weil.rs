use super::report::{fmt_c, relative, ResidualReport};
use crate::error::{Error, Result};
use crate::theta::{theta_jets, DirectionalJet, PeriodMatrix, TruncationPolicy};
use crate::C64;

pub const WEIL_TOLERANCE: f64 = 1e-7;
/// Sample pairs tried for the `2×2` solve before giving up.
pub const WEIL_ATTEMPTS: usize = 8;

#[derive(Clone, Debug)]
pub struct WeilReport {
    pub report: ResidualReport,
    pub a: C64,
    pub b: C64,
}

fn theta0(tau: &PeriodMatrix, z: &[C64], policy: &TruncationPolicy) -> Result<C64> {
    Ok(theta_jets(tau, z, &[DirectionalJet::none()], policy)?[0])
}

fn shifted(z: &[C64], terms: &[(f64, &[C64])]) -> Vec<C64> {
    (0..z.len()).map(|i| z[i] + terms.iter().map(|(s, v)| v[i] * *s).sum::<C64>()).collect()
}

/// The three products `θ(z+p+s−r−q)θ(z)`, `θ(z+s−r)θ(z+p−q)`, `θ(z+p−r)θ(z+s−q)`.
pub fn weil_terms(tau: &PeriodMatrix, aj: &[Vec<C64>; 4], z: &[C64], policy: &TruncationPolicy) -> Result<[C64; 3]> {
    let [p, q, r, s] = aj;
    let t1 = theta0(tau, &shifted(z, &[(1.0, p), (1.0, s), (-1.0, r), (-1.0, q)]), policy)? * theta0(tau, z, policy)?;
    let t2 = theta0(tau, &shifted(z, &[(1.0, s), (-1.0, r)]), policy)?
        * theta0(tau, &shifted(z, &[(1.0, p), (-1.0, q)]), policy)?;
    let t3 = theta0(tau, &shifted(z, &[(1.0, p), (-1.0, r)]), policy)?
        * theta0(tau, &shifted(z, &[(1.0, s), (-1.0, q)]), policy)?;
    Ok([t1, t2, t3])
}

/// Solve `A·t1 + B·t2 = t3` from two samples, then measure the misfit on the
/// others. Pairs `(0,1), (2,3), …` are tried until one is well conditioned.
pub fn weil_residual(
    tau: &PeriodMatrix,
    aj: &[Vec<C64>; 4],
    z_samples: &[Vec<C64>],
    policy: &TruncationPolicy,
) -> Result<WeilReport> {
    let g = tau.genus();
    for v in aj.iter().chain(z_samples) {
        if v.len() != g {
            return Err(Error::DimensionMismatch { expected: g, got: v.len() });
        }
    }
    let pq: Vec<C64> = aj[0].iter().zip(&aj[1]).map(|(a, b)| a - b).collect();
    let (s, t) = tau.cell_coordinates(&pq);
    if s.iter().chain(&t).all(|x| (x - x.round()).abs() < 1e-9) {
        return Err(Error::DegenerateQuery("p - q is a lattice vector".into()));
    }
    if z_samples.len() < 3 {
        return Err(Error::InvalidArgument("need at least three samples".into()));
    }
    let terms = z_samples.iter().map(|z| weil_terms(tau, aj, z, policy)).collect::<Result<Vec<_>>>()?;
    let mut solved = None;
    for attempt in 0..WEIL_ATTEMPTS {
        let (i, j) = (2 * attempt, 2 * attempt + 1);
        if j >= terms.len() {
            break;
        }
        let (x, y) = (terms[i], terms[j]);
        let det = x[0] * y[1] - x[1] * y[0];
        let size = (x[0].norm() * y[1].norm()).max(x[1].norm() * y[0].norm());
        if det.norm() <= 1e-10 * size || size == 0.0 {
            continue;
        }
        let a = (x[2] * y[1] - x[1] * y[2]) / det;
        let b = (x[0] * y[2] - x[2] * y[0]) / det;
        solved = Some((a, b, i, j));
        break;
    }
    let Some((a, b, i, j)) = solved else {
        return Err(Error::SingularSystem(format!("no well-conditioned sample pair in {WEIL_ATTEMPTS} attempts")));
    };
    let mut worst = 0.0f64;
    let mut worst_norm = f64::MIN_POSITIVE;
    let mut held = 0usize;
    for (k, t) in terms.iter().enumerate() {
        if k == i || k == j {
            continue;
        }
        held += 1;
        let (r, n) = relative((a * t[0] + b * t[1] - t[2]).norm(), &[(a * t[0]).norm(), (b * t[1]).norm(), t[2].norm()]);
        if r > worst || held == 1 {
            worst = worst.max(r);
            worst_norm = n;
        }
    }
    if held == 0 {
        return Err(Error::InvalidArgument("no held-out samples left".into()));
    }
    let report = ResidualReport::below("weil", "", worst, worst_norm, WEIL_TOLERANCE)
        .with_param("A", fmt_c(a))
        .with_param("B", fmt_c(b));
    Ok(WeilReport { report, a, b })
}
