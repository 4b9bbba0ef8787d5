//! Burchnall–Chaundy polynomials of commuting operator pairs.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::diffop::{commuting_pair_2_3, eigenvalue_series, DiffOp, PseudoDiffOp, TaylorSeries, EIGEN_DEPTH};
use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::C64;

/// Coefficients within this distance of a rational are snapped to it.
pub const RATIONAL_TOLERANCE: f64 = 1e-9;
/// Largest denominator considered when snapping.
pub const MAX_DENOMINATOR: i64 = 10_000;
/// Relative residual above which the Laurent system counts as inconsistent.
pub const RELATION_TOLERANCE: f64 = 1e-8;

/// `Σ c_{ab} α^a β^b` for a pair of orders `(n, m)`; `α` has weight `n`, `β` weight `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct BivariatePoly {
    pub n: usize,
    pub m: usize,
    coeffs: BTreeMap<(usize, usize), C64>,
}

impl BivariatePoly {
    pub fn new(n: usize, m: usize, coeffs: BTreeMap<(usize, usize), C64>) -> Self {
        BivariatePoly { n, m, coeffs }
    }

    /// Coefficient of `α^a β^b`.
    pub fn coeff(&self, a: usize, b: usize) -> C64 {
        self.coeffs.get(&(a, b)).copied().unwrap_or_default()
    }

    pub fn set(&mut self, a: usize, b: usize, c: C64) {
        self.coeffs.insert((a, b), c);
    }

    /// Nonzero terms `((a, b), c)`.
    pub fn terms(&self) -> impl Iterator<Item = ((usize, usize), C64)> + '_ {
        self.coeffs.iter().filter(|(_, c)| c.norm() > 0.0).map(|(k, c)| (*k, *c))
    }

    pub fn weighted_degree(&self) -> usize {
        self.terms().map(|((a, b), _)| self.n * a + self.m * b).max().unwrap_or(0)
    }

    pub fn degree_alpha(&self) -> usize {
        self.terms().map(|((a, _), _)| a).max().unwrap_or(0)
    }

    pub fn degree_beta(&self) -> usize {
        self.terms().map(|((_, b), _)| b).max().unwrap_or(0)
    }

    pub fn eval(&self, alpha: C64, beta: C64) -> C64 {
        self.terms().map(|((a, b), c)| c * alpha.powi(a as i32) * beta.powi(b as i32)).sum()
    }
}

fn fmt_coeff(c: C64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else {
        format!("({}{:+}i)", c.re, c.im)
    }
}

impl fmt::Display for BivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<_> = self.terms().collect();
        terms.sort_by_key(|((a, b), _)| (std::cmp::Reverse(self.n * a + self.m * b), std::cmp::Reverse(*b)));
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, ((a, b), c)) in terms.into_iter().enumerate() {
            let mono: Vec<String> = [(a, "a"), (b, "b")]
                .iter()
                .filter(|(e, _)| *e > 0)
                .map(|(e, v)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") })
                .collect();
            let mono = mono.join("*");
            let (sign, mag) = if c.im == 0.0 && c.re < 0.0 { ("-", -c) } else { ("+", c) };
            if i == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            match (mono.is_empty(), mag == C64::new(1.0, 0.0)) {
                (true, _) => write!(f, "{}", fmt_coeff(mag))?,
                (false, true) => write!(f, "{mono}")?,
                (false, false) => write!(f, "{}*{mono}", fmt_coeff(mag))?,
            }
        }
        Ok(())
    }
}

/// Nearest rational `p/q` with `q ≤ max_den`, when within `tol`.
pub fn snap_rational(x: f64, max_den: i64, tol: f64) -> Option<f64> {
    if !x.is_finite() {
        return None;
    }
    // continued-fraction convergents
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i64;
        let (h2, k2) = (a.checked_mul(h1)?.checked_add(h0)?, a.checked_mul(k1)?.checked_add(k0)?);
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let v = h1 as f64 / k1 as f64;
        if (v - x).abs() <= tol {
            return Some(v);
        }
        let frac = r - a as f64;
        if frac == 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

fn snap(c: C64) -> C64 {
    let re = snap_rational(c.re, MAX_DENOMINATOR, RATIONAL_TOLERANCE).unwrap_or(c.re);
    let im = snap_rational(c.im, MAX_DENOMINATOR, RATIONAL_TOLERANCE).unwrap_or(c.im);
    C64::new(re, im)
}

/// Truncated Laurent series in `k`: `coeffs[p]` multiplies `k^{top − p}`.
#[derive(Clone, Debug)]
struct KSeries {
    top: i64,
    coeffs: Vec<C64>,
}

impl KSeries {
    fn mul(&self, o: &KSeries) -> KSeries {
        let len = self.coeffs.len().min(o.coeffs.len());
        let mut c = vec![C64::new(0.0, 0.0); len];
        for i in 0..len {
            for j in 0..len - i {
                c[i + j] += self.coeffs[i] * o.coeffs[j];
            }
        }
        KSeries { top: self.top + o.top, coeffs: c }
    }

    /// Coefficient of `k^e`, `None` past the known depth.
    fn at(&self, e: i64) -> Option<C64> {
        let p = self.top - e;
        if p < 0 {
            Some(C64::new(0.0, 0.0))
        } else {
            self.coeffs.get(p as usize).copied()
        }
    }
}

/// The monic-in-`β` relation `Q(α, β) = 0` with `α = kⁿ`, `β = A(k)`.
pub fn burchnall_chaundy(l1: &DiffOp, l2: &DiffOp) -> Result<BivariatePoly> {
    burchnall_chaundy_at_depth(l1, l2, EIGEN_DEPTH)
}

pub fn burchnall_chaundy_at_depth(l1: &DiffOp, l2: &DiffOp, depth: usize) -> Result<BivariatePoly> {
    let (n, m) = (l1.order(), l2.order());
    if gcd(n, m) != 1 {
        return Err(Error::InvalidArgument(format!("orders {n} and {m} are not coprime")));
    }
    let a = eigenvalue_series(l1, l2, depth)?;
    let beta = KSeries { top: m as i64, coeffs: a.coeffs.clone() };
    let mut powers = vec![KSeries { top: 0, coeffs: {
        let mut v = vec![C64::new(0.0, 0.0); depth + 1];
        v[0] = C64::new(1.0, 0.0);
        v
    } }];
    for b in 1..=n {
        powers.push(powers[b - 1].mul(&beta));
    }
    let nm = (n * m) as i64;
    let unknowns: Vec<(usize, usize)> =
        (0..n).flat_map(|b| (0..=(n * m - m * b) / n).map(move |a| (a, b))).collect();
    let rows: Vec<i64> = (nm - depth as i64..=nm).rev().collect();
    if rows.len() < unknowns.len() {
        return Err(Error::NoRelationAtDepth { residual: f64::INFINITY });
    }
    let mut mat = DMatrix::<C64>::zeros(rows.len(), unknowns.len());
    let mut rhs = DVector::<C64>::zeros(rows.len());
    for (r, &e) in rows.iter().enumerate() {
        rhs[r] = -powers[n].at(e).ok_or(Error::NoRelationAtDepth { residual: f64::INFINITY })?;
        for (col, &(a, b)) in unknowns.iter().enumerate() {
            mat[(r, col)] = powers[b].at(e - (n * a) as i64).ok_or(Error::NoRelationAtDepth { residual: f64::INFINITY })?;
        }
    }
    let sol = least_squares(&mat, &rhs).ok_or(Error::NoRelationAtDepth { residual: f64::INFINITY })?;
    let fit = &mat * &sol - &rhs;
    let scale = rhs.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let residual = fit.iter().map(|v| v.norm()).fold(0.0, f64::max) / scale;
    if residual > RELATION_TOLERANCE {
        return Err(Error::NoRelationAtDepth { residual });
    }
    let mut coeffs = BTreeMap::new();
    coeffs.insert((0, n), C64::new(1.0, 0.0));
    for (&(a, b), &c) in unknowns.iter().zip(sol.iter()) {
        let c = snap(c);
        if c.norm() > 0.0 {
            coeffs.insert((a, b), c);
        }
    }
    Ok(BivariatePoly { n, m, coeffs })
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `Q(L₁, L₂)` by direct composition, with the magnitude of its terms.
#[derive(Clone, Debug)]
pub struct Annihilation {
    pub operator: DiffOp,
    /// Largest coefficient magnitude over all `∂`-powers and series orders.
    pub residual: f64,
    /// Largest coefficient relative to the magnitude of the terms producing it.
    pub relative: f64,
}

/// Evaluate `Q(L₁, L₂) = Σ c_{ab} L₁^a L₂^b`.
pub fn verify_annihilation(l1: &DiffOp, l2: &DiffOp, q: &BivariatePoly) -> Result<Annihilation> {
    let (p1, p2) = (l1.to_pseudo(), l2.to_pseudo());
    let x0 = l1.basepoint();
    let order = p1.series_order().max(p2.series_order());
    let id = PseudoDiffOp::identity(x0, order);
    let mut sum: Option<PseudoDiffOp> = None;
    let mut mag: Option<PseudoDiffOp> = None;
    for ((a, b), c) in q.terms() {
        let (mut t, mut tm) = (id.clone(), id.clone());
        for _ in 0..a {
            tm = tm.compose_magnitude(&p1)?;
            t = t.compose(&p1)?;
        }
        for _ in 0..b {
            tm = tm.compose_magnitude(&p2)?;
            t = t.compose(&p2)?;
        }
        let t = t.scale(c);
        let tm = tm.scale(C64::new(c.norm(), 0.0));
        sum = Some(match sum {
            Some(s) => s.add(&t)?,
            None => t,
        });
        mag = Some(match mag {
            Some(s) => s.add(&tm)?,
            None => tm,
        });
    }
    let sum = sum.unwrap_or_else(|| PseudoDiffOp::identity(x0, order).scale(C64::new(0.0, 0.0)));
    let relative = mag.map_or(0.0, |m| sum.relative_size(&m));
    Ok(Annihilation { residual: sum.max_abs(), relative, operator: sum.plus_part()? })
}

/// Taylor expansion of `℘(x; g₂, g₃)` at a regular point `x₀` inside the
/// disc of convergence of the Laurent series at the origin.
pub fn weierstrass_p_series(g2: C64, g3: C64, x0: C64, order: usize) -> Result<TaylorSeries> {
    if x0.norm() == 0.0 {
        return Err(Error::InvalidArgument("x0 is a pole of the Weierstrass function".into()));
    }
    // ℘ = z⁻² + Σ_{k≥2} c_k z^{2k−2}
    let kmax = 120;
    let mut c = vec![C64::new(0.0, 0.0); kmax + 1];
    c[2] = g2 / 20.0;
    c[3] = g3 / 28.0;
    for k in 4..=kmax {
        let s: C64 = (2..=k - 2).map(|j| c[j] * c[k - j]).sum();
        c[k] = s * 3.0 / (((2 * k + 1) * (k - 3)) as f64);
    }
    let mut p = x0.powi(-2);
    let mut dp = x0.powi(-3) * -2.0;
    let mut last: f64 = 0.0;
    for (k, &ck) in c.iter().enumerate().skip(2) {
        let t = ck * x0.powi(2 * k as i32 - 2);
        p += t;
        dp += ck * (2 * k - 2) as f64 * x0.powi(2 * k as i32 - 3);
        last = t.norm();
    }
    if !(last <= 1e-17 * p.norm()) {
        return Err(Error::InvalidArgument("x0 outside the disc where the Laurent series converges quickly".into()));
    }
    // ℘″ = 6℘² − g₂/2
    let mut a = vec![C64::new(0.0, 0.0); order + 1];
    a[0] = p;
    if order >= 1 {
        a[1] = dp;
    }
    for k in 0..order.saturating_sub(1) {
        let sq: C64 = (0..=k).map(|i| a[i] * a[k - i]).sum();
        let src = if k == 0 { sq * 6.0 - g2 / 2.0 } else { sq * 6.0 };
        a[k + 2] = src / ((k + 1) * (k + 2)) as f64;
    }
    Ok(TaylorSeries::new(x0, a))
}

/// Lamé pair `(∂² − 2℘, ∂³ − 3℘∂ − (3/2)℘′)` at `x₀`.
pub fn lame_pair(g2: C64, g3: C64, x0: C64, order: usize) -> Result<(DiffOp, DiffOp)> {
    let p = weierstrass_p_series(g2, g3, x0, order)?;
    commuting_pair_2_3(&p.scale(C64::new(-2.0, 0.0)), C64::new(0.0, 0.0))
}
