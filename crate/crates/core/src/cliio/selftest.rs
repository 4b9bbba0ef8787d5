//! Operator-algebra self-test and Burchnall–Chaundy entry points for the CLI.

use crate::cliio::random::rng_from_seed;
use crate::diffop::*;
use crate::error::{Error, Result};
use crate::identities::ResidualReport;
use crate::spectral::{burchnall_chaundy, lame_pair, verify_annihilation, Annihilation, BivariatePoly};
use crate::C64;
use rand::Rng;

const N: usize = SERIES_ORDER;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `(∂² − 2x⁻², ∂³ − 3x⁻²∂ + 3x⁻³)` at `x₀`.
pub fn rational_pair(x0: C64) -> (DiffOp, DiffOp) {
    let z = TaylorSeries::zero(x0, N);
    let l1 = DiffOp::monic(vec![TaylorSeries::power(x0, -2.0, N).scale(c(-2.0, 0.0)), z.clone()]);
    let l2 = DiffOp::monic(vec![
        TaylorSeries::power(x0, -3.0, N).scale(c(3.0, 0.0)),
        TaylorSeries::power(x0, -2.0, N).scale(c(-3.0, 0.0)),
        z,
    ]);
    (l1, l2)
}

/// `(∂², ∂³)`.
pub fn constant_pair(x0: C64) -> (DiffOp, DiffOp) {
    let z = TaylorSeries::zero(x0, N);
    (DiffOp::monic(vec![z.clone(), z.clone()]), DiffOp::monic(vec![z.clone(), z.clone(), z]))
}

/// Named commuting pair for `spectral bc`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PairSpec {
    Constant,
    Rational { x0: f64 },
    Lame { g2: f64, g3: f64, x0: f64 },
}

impl PairSpec {
    pub fn build(&self) -> Result<(DiffOp, DiffOp)> {
        match *self {
            PairSpec::Constant => Ok(constant_pair(c(0.0, 0.0))),
            PairSpec::Rational { x0 } => {
                if x0 == 0.0 {
                    return Err(Error::InvalidArgument("the rational pair is singular at x0 = 0".into()));
                }
                Ok(rational_pair(c(x0, 0.0)))
            }
            PairSpec::Lame { g2, g3, x0 } => lame_pair(c(g2, 0.0), c(g3, 0.0), c(x0, 0.0), N),
        }
    }
}

/// Spectral relation of a named pair and its annihilation certificate.
pub fn spectral_bc(pair: &PairSpec) -> Result<(BivariatePoly, Annihilation)> {
    let (l1, l2) = pair.build()?;
    let q = burchnall_chaundy(&l1, &l2)?;
    let ann = verify_annihilation(&l1, &l2, &q)?;
    Ok((q, ann))
}

fn random_series(x0: C64, order: usize, seed: u64) -> TaylorSeries {
    let mut rng = rng_from_seed(seed);
    TaylorSeries::new(x0, (0..=order).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
}

fn rel_diff(a: &PseudoDiffOp, b: &PseudoDiffOp) -> f64 {
    let m = a.max_abs().max(b.max_abs());
    if m == 0.0 {
        0.0
    } else {
        a.max_diff(b) / m
    }
}

fn report(name: &str, residual: f64, tolerance: f64) -> ResidualReport {
    ResidualReport::below("ops", name, residual, 1.0, tolerance)
}

fn flag(name: &str, ok: bool) -> ResidualReport {
    report(name, if ok { 0.0 } else { 1.0 }, 0.5)
}

/// Operator-algebra checks, one report per property.
pub fn ops_selftest() -> Result<Vec<ResidualReport>> {
    let mut out = Vec::new();
    let x0 = c(0.3, 0.0);

    let op = |seed: u64, top: i64, len: usize| -> Result<PseudoDiffOp> {
        PseudoDiffOp::new(top, (0..len).map(|i| random_series(x0, 14, seed * 31 + i as u64)).collect(), false)
    };
    let (p, q, r) = (op(1, 2, 3)?, op(2, -1, 4)?, op(3, 1, 3)?);
    let a = p.compose(&q)?.compose(&r)?;
    let b = p.compose(&q.compose(&r)?)?;
    let floor = a.reliable_floor().max(b.reliable_floor()).max(a.low()).max(b.low());
    out.push(report("compose-associativity", rel_diff(&a.restrict(floor)?, &b.restrict(floor)?), 1e-11));

    // ∂ ∘ x = x∂ + 1 and ∂⁻¹ ∘ ∂ = 1.
    let x = TaylorSeries::identity(x0, N);
    let dx = PseudoDiffOp::d_pow(x0, 1, N).compose(&PseudoDiffOp::monomial(x.clone(), 0))?;
    let want = PseudoDiffOp::new(1, vec![x, TaylorSeries::constant(x0, c(1.0, 0.0), N)], false)?;
    out.push(report("leibniz", dx.max_diff(&want), 1e-15));
    let inv = PseudoDiffOp::d_pow(x0, -1, N).compose(&PseudoDiffOp::d_pow(x0, 1, N))?;
    out.push(report("inverse-derivative", inv.max_diff(&PseudoDiffOp::identity(x0, N)), 1e-15));

    let u = random_series(x0, N, 11);
    let l = DiffOp::monic(vec![u, TaylorSeries::zero(x0, N)]);
    out.push(report("eigenfunction-defect", formal_eigenfunction(&l, EIGEN_DEPTH)?.defect, 1e-12));

    let (a1, b1) = rational_pair(c(1.0, 0.0));
    let (a2, b2) = rational_pair(c(2.0, 0.0));
    let s1 = eigenvalue_series(&a1, &b1, EIGEN_DEPTH)?;
    let s2 = eigenvalue_series(&a2, &b2, EIGEN_DEPTH)?;
    let drift = s1.coeffs.iter().zip(&s2.coeffs).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
    out.push(report("eigenvalue-basepoint", drift, 1e-10));

    let (qr, ann) = spectral_bc(&PairSpec::Rational { x0: 2.0 })?;
    let mut cusp_err: f64 = 0.0;
    for a in 0..=3 {
        for b in 0..=2 {
            let want = match (a, b) {
                (0, 2) => 1.0,
                (3, 0) => -1.0,
                _ => 0.0,
            };
            cusp_err = cusp_err.max((qr.coeff(a, b) - want).norm());
        }
    }
    out.push(report("bc-rational-coefficients", cusp_err, 1e-9));
    out.push(report("bc-rational-annihilation", ann.residual, 1e-9));
    let (_, lame) = spectral_bc(&PairSpec::Lame { g2: 4.0, g3: 0.0, x0: 1.0 })?;
    out.push(report("bc-lame-annihilation", lame.residual, 1e-8));

    let y = c(0.0, 0.0);
    let u2 = random_series(y, N, 21);
    let u3 = random_series(y, N, 22);
    let lax = PseudoDiffOp::new(1, vec![TaylorSeries::constant(y, c(1.0, 0.0), N), TaylorSeries::zero(y, N), u2.clone(), u3.clone()], false)?;
    let (bb2, _) = power_plus_and_residue(&lax, 2)?;
    let b2_err = bb2.coeff(1).max_abs().max(bb2.coeff(0).max_diff(&u2.scale(c(2.0, 0.0))));
    out.push(report("sato-b2", b2_err, 1e-14));
    let (bb3, _) = power_plus_and_residue(&lax, 3)?;
    let want0 = (&u2.deriv() + &u3).scale(c(3.0, 0.0));
    let b3_err = bb3.coeff(2).max_abs().max(bb3.coeff(1).max_diff(&u2.scale(c(3.0, 0.0)))).max(bb3.coeff(0).max_diff(&want0));
    out.push(report("sato-b3", b3_err, 1e-13));

    let w = PseudoDiffOp::new(0, vec![TaylorSeries::constant(x0, c(1.0, 0.0), N), random_series(x0, N, 31), random_series(x0, N, 32)], false)?;
    let (_, dressed) = dress(&w)?;
    out.push(report("dress-zero-coefficient", dressed.coeff_or_zero(0)?.max_abs() / dressed.max_abs(), 1e-9));

    let amb = sample_ambient(80)?;
    let fam = wave_recursion_laurent(&amb, c(0.7, 0.0), 10)?;
    out.push(flag("wave-simple-poles", fam.xi.len() == 11 && fam.max_pole_order <= 1));
    let y0 = amb.basepoint();
    let bad_w = &amb.w + &TaylorSeries::constant(y0, c(0.05, 0.0), amb.w.len() - 1);
    let path: Vec<C64> = amb.path.coeffs()[..5].to_vec();
    let bad = LaurentAmbient::new(&path, y0, amb.v.clone(), bad_w, amb.higher.clone())?;
    let obstructed = matches!(wave_recursion_laurent(&bad, c(0.0, 0.0), 10), Err(Error::ResidueObstruction { .. }));
    out.push(flag("wave-residue-obstruction", obstructed));
    Ok(out)
}

/// Pole path of degree 4 with the pole condition imposed, from a seed.
pub fn sample_ambient(seed: u64) -> Result<LaurentAmbient> {
    let y0 = c(0.0, 0.0);
    let mut rng = rng_from_seed(seed);
    let path: Vec<C64> = (0..=4).map(|_| c(rng.gen_range(-0.5..0.5), 0.0)).collect();
    let v = random_series(y0, N, seed + 1);
    let higher = (0..3).map(|i| random_series(y0, N, seed + 2 + i)).collect();
    LaurentAmbient::with_pole_condition(&path, y0, v, higher)
}
