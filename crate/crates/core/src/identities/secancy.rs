use super::report::ResidualReport;
use crate::error::{Error, Result};
use crate::linalg::{max_minor3, norm};
use crate::theta::{kummer_vector_jets, DirectionalJet, PeriodMatrix, TruncationPolicy};
use crate::C64;

pub const SECANCY_TOLERANCE: f64 = 1e-6;
/// Points closer than this (in cell coordinates) to a two-torsion point, or
/// to each other modulo the lattice, are rejected.
pub const TORSION_GUARD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SecancyMode {
    /// Rows `Kum(a), Kum(b), Kum(c)`.
    Full,
    /// Rows `Kum(a), ∂_U Kum(a), Kum(b)`.
    Tangent,
    /// Rows `Kum(q/2), ∂_U Kum(q/2), (∂_U² + ∂_V) Kum(q/2)`.
    Flex,
}

impl SecancyMode {
    pub fn name(self) -> &'static str {
        match self {
            SecancyMode::Full => "full",
            SecancyMode::Tangent => "tangent",
            SecancyMode::Flex => "flex",
        }
    }
}

impl std::str::FromStr for SecancyMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(SecancyMode::Full),
            "tangent" => Ok(SecancyMode::Tangent),
            "flex" => Ok(SecancyMode::Flex),
            _ => Err(Error::InvalidArgument(format!("unknown secancy mode {s:?}"))),
        }
    }
}

/// Points and directions for a secancy check.
///
/// `points` holds `a, b, c` (full), `a, b` (tangent) or `q` (flex). Full-mode
/// points are the Kummer arguments themselves, already combined.
#[derive(Clone, Debug)]
pub struct SecancyQuery {
    pub mode: SecancyMode,
    pub points: Vec<Vec<C64>>,
    pub u: Vec<C64>,
    pub v: Vec<C64>,
}

fn frac_distance(x: f64, step: f64) -> f64 {
    let r = x / step;
    (r - r.round()).abs() * step
}

fn near_lattice(tau: &PeriodMatrix, z: &[C64], step: f64) -> bool {
    let (s, t) = tau.cell_coordinates(z);
    s.iter().chain(&t).all(|&x| frac_distance(x, step) < TORSION_GUARD)
}

/// `true` when `z` is within the guard of a two-torsion point.
pub fn is_two_torsion(tau: &PeriodMatrix, z: &[C64]) -> bool {
    near_lattice(tau, z, 0.5)
}

fn check_point(tau: &PeriodMatrix, z: &[C64]) -> Result<()> {
    if z.len() != tau.genus() {
        return Err(Error::DimensionMismatch { expected: tau.genus(), got: z.len() });
    }
    if is_two_torsion(tau, z) {
        return Err(Error::DegenerateQuery("point within 1e-6 of a two-torsion point".into()));
    }
    Ok(())
}

/// Largest `3×3` minor of the three Kummer-derived rows over the product of
/// the row norms.
pub fn secancy_residual(tau: &PeriodMatrix, query: &SecancyQuery, policy: &TruncationPolicy) -> Result<ResidualReport> {
    let g = tau.genus();
    let need = match query.mode {
        SecancyMode::Full => 3,
        SecancyMode::Tangent => 2,
        SecancyMode::Flex => 1,
    };
    if query.points.len() != need {
        return Err(Error::DegenerateQuery(format!(
            "{} mode needs {need} points, got {}",
            query.mode.name(),
            query.points.len()
        )));
    }
    let uses_u = query.mode != SecancyMode::Full;
    if uses_u && (query.u.len() != g || query.u.iter().all(|x| x.norm() == 0.0)) {
        return Err(Error::DegenerateQuery("direction U must be a nonzero g-vector".into()));
    }
    let rows: Vec<Vec<C64>> = match query.mode {
        SecancyMode::Full => {
            for p in &query.points {
                check_point(tau, p)?;
            }
            for i in 0..3 {
                for j in i + 1..3 {
                    let d: Vec<C64> = query.points[i].iter().zip(&query.points[j]).map(|(a, b)| a - b).collect();
                    if near_lattice(tau, &d, 1.0) {
                        return Err(Error::DegenerateQuery(format!("points {i} and {j} coincide modulo the lattice")));
                    }
                }
            }
            let none = [DirectionalJet::none()];
            let mut rows = Vec::with_capacity(3);
            for p in &query.points {
                rows.push(kummer_vector_jets(tau, p, &none, policy)?.remove(0));
            }
            rows
        }
        SecancyMode::Tangent => {
            let (a, b) = (&query.points[0], &query.points[1]);
            check_point(tau, a)?;
            check_point(tau, b)?;
            let mut ra = kummer_vector_jets(tau, a, &[DirectionalJet::none(), DirectionalJet::along(&query.u, 1)], policy)?;
            let rb = kummer_vector_jets(tau, b, &[DirectionalJet::none()], policy)?.remove(0);
            let d = ra.remove(1);
            vec![ra.remove(0), d, rb]
        }
        SecancyMode::Flex => {
            if query.v.len() != g {
                return Err(Error::DimensionMismatch { expected: g, got: query.v.len() });
            }
            let half: Vec<C64> = query.points[0].iter().map(|x| x * 0.5).collect();
            check_point(tau, &half)?;
            let jets = [
                DirectionalJet::none(),
                DirectionalJet::along(&query.u, 1),
                DirectionalJet::along(&query.u, 2),
                DirectionalJet::along(&query.v, 1),
            ];
            let r = kummer_vector_jets(tau, &half, &jets, policy)?;
            let third: Vec<C64> = r[2].iter().zip(&r[3]).map(|(a, b)| a + b).collect();
            vec![r[0].clone(), r[1].clone(), third]
        }
    };
    let prod: f64 = rows.iter().map(|r| norm(r)).product();
    let residual = secancy_from_rows(&rows[0], &rows[1], &rows[2]);
    Ok(ResidualReport::below("secancy", "", residual, prod, SECANCY_TOLERANCE).with_param("mode", query.mode.name()))
}

/// Largest `|3×3 minor|` of the rows over the product of their norms.
pub fn secancy_from_rows(r0: &[C64], r1: &[C64], r2: &[C64]) -> f64 {
    let prod = norm(r0) * norm(r1) * norm(r2);
    if prod > 0.0 {
        max_minor3(r0, r1, r2) / prod
    } else {
        0.0
    }
}
