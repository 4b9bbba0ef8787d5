use crate::error::{Error, Result};
use crate::C64;

use super::op::DiffOp;
use super::series::{binomial, TaylorSeries};

/// Default eigen-depth.
pub const EIGEN_DEPTH: usize = 12;

/// Relative tolerance for "vanishes to truncation" checks in this module.
pub const ALGEBRA_TOLERANCE: f64 = 1e-9;

/// Formal eigenfunction `ψ = e^{kx} Σ_s ξ_s(x) k^{−s}` of a canonical order-`n`
/// operator, with eigenvalue `E = kⁿ`.
#[derive(Clone, Debug)]
pub struct EigenSeries {
    pub x0: C64,
    pub n: usize,
    /// `ξ₀ ≡ 1`, `ξ_s(x₀) = 0` for `s ≥ 1`.
    pub xi: Vec<TaylorSeries>,
    /// Coefficientwise magnitudes of the terms summed into each `ξ_s`.
    pub bounds: Vec<TaylorSeries>,
    /// Largest coefficient of `e^{−kx}(L − kⁿ)ψ` through `k^{n−S−1}`, relative
    /// to the magnitude of the terms producing it.
    pub defect: f64,
}

fn abs_series(f: &TaylorSeries) -> TaylorSeries {
    TaylorSeries::new(f.basepoint(), f.coeffs().iter().map(|v| C64::new(v.norm(), 0.0)).collect())
}

fn add_into(out: &mut Option<TaylorSeries>, term: TaylorSeries) {
    *out = Some(match out.take() {
        Some(o) => &o + &term,
        None => term,
    });
}

/// Coefficient of `k^{top − idx}` in `Σ_i u_i Σ_j C(i, j) k^{i−j} ∂^j Σ_s ξ_s k^{−s}`,
/// restricted to the `(i, j, s)` accepted by `keep`. With `magnitude` set the
/// inputs are magnitude series and binomials enter by absolute value.
fn conj_sum(us: &[TaylorSeries], derivs: &[Vec<TaylorSeries>], top: usize, idx: usize, magnitude: bool, keep: impl Fn(usize, usize, usize) -> bool) -> Option<TaylorSeries> {
    let mut out = None;
    for (i, u) in us.iter().enumerate() {
        for j in 0..=i {
            let s = idx as i64 + i as i64 - j as i64 - top as i64;
            if s < 0 || s as usize >= derivs.len() || !keep(i, j, s as usize) {
                continue;
            }
            let c = binomial(i as f64, j);
            let c = if magnitude { c.abs() } else { c };
            add_into(&mut out, (u * &derivs[s as usize][j]).scale(C64::new(c, 0.0)));
        }
    }
    out
}

/// Largest `|r_j| / bound_j` over the common orders.
fn relative_to(r: &TaylorSeries, bound: &TaylorSeries) -> f64 {
    r.coeffs()
        .iter()
        .zip(bound.coeffs())
        .filter(|(v, _)| v.norm() > 0.0)
        .map(|(v, b)| v.norm() / b.norm().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

fn derivs_upto(f: &TaylorSeries, n: usize) -> Vec<TaylorSeries> {
    let mut v = vec![f.clone()];
    for _ in 0..n {
        let d = v.last().unwrap().deriv();
        v.push(d);
    }
    v
}

fn is_canonical(l: &DiffOp) -> bool {
    let n = l.order();
    let one = TaylorSeries::constant(l.basepoint(), C64::new(1.0, 0.0), l.coeff(n).len().max(1) - 1);
    n >= 1 && l.coeff(n).max_diff(&one) < 1e-12 && (n < 2 || l.coeff(n - 1).max_abs() < 1e-12)
}

/// Normalized formal eigenfunction of a canonical `L = ∂ⁿ + u_{n−2}∂^{n−2} + ⋯ + u₀`.
///
/// The defect is measured coefficientwise against the magnitudes of the terms
/// that enter it, so rounding in high Taylor orders does not count as failure.
pub fn formal_eigenfunction(l: &DiffOp, depth: usize) -> Result<EigenSeries> {
    if !is_canonical(l) {
        return Err(Error::InvalidArgument("operator is not canonical (needs u_n = 1, u_{n-1} = 0)".into()));
    }
    let n = l.order();
    let x0 = l.basepoint();
    let order = l.coeffs().iter().map(|c| c.len()).max().unwrap_or(1) - 1;
    let us = l.coeffs().to_vec();
    let abs_us: Vec<TaylorSeries> = us.iter().map(abs_series).collect();
    let unit = TaylorSeries::constant(x0, C64::new(1.0, 0.0), order);
    let mut derivs = vec![derivs_upto(&unit, n)];
    let mut mags = vec![derivs_upto(&unit, n)];
    let mut xi = vec![unit.clone()];
    let mut bounds = vec![unit];
    for m in 1..=depth {
        // the k^{n−m−1} equation gives n ξ_m′ in terms of ξ_0..ξ_{m−1}
        let keep = |i: usize, j: usize, s: usize| s < m && !(i == n && j <= 1);
        let rhs = conj_sum(&us, &derivs, n, m + 1, false, keep).unwrap_or_else(|| TaylorSeries::zero(x0, order));
        let mag = conj_sum(&abs_us, &mags, n, m + 1, true, keep).unwrap_or_else(|| TaylorSeries::zero(x0, order));
        let next = rhs.scale(C64::new(-1.0 / n as f64, 0.0)).integrate();
        if next.len() < 2 {
            return Err(Error::TruncationUnderflow { requested: m as i64, available: m as i64 - 1 });
        }
        let bound = mag.scale(C64::new(1.0 / n as f64, 0.0)).integrate();
        derivs.push(derivs_upto(&next, n));
        mags.push(derivs_upto(&bound, n));
        xi.push(next);
        bounds.push(bound);
    }
    let mut defect: f64 = 0.0;
    for idx in 0..=depth + 1 {
        // ξ_idx from (i, j) = (n, 0) cancels against kⁿ ξ_idx
        let keep = |i: usize, j: usize, _s: usize| !(i == n && j == 0);
        if let (Some(d), Some(b)) = (conj_sum(&us, &derivs, n, idx, false, keep), conj_sum(&abs_us, &mags, n, idx, true, keep)) {
            defect = defect.max(relative_to(&d, &b));
        }
    }
    Ok(EigenSeries { x0, n, xi, bounds, defect })
}

/// `A(k) = Σ_p a_p k^{m−p}` with `L₂ψ = A(k)ψ`.
#[derive(Clone, Debug)]
pub struct EigenvalueSeries {
    pub n: usize,
    pub m: usize,
    pub x0: C64,
    /// `coeffs[p]` multiplies `k^{m−p}`.
    pub coeffs: Vec<C64>,
}

impl EigenvalueSeries {
    /// Coefficient of `k^power`, zero outside the computed range.
    pub fn coeff(&self, power: i64) -> C64 {
        let p = self.m as i64 - power;
        if p < 0 || p as usize >= self.coeffs.len() {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[p as usize]
        }
    }
}

/// Largest coefficient of `[L₁, L₂]` relative to the magnitude of the terms
/// that produced it.
pub fn commutator_residual(l1: &DiffOp, l2: &DiffOp) -> Result<f64> {
    let (p, q) = (l1.to_pseudo(), l2.to_pseudo());
    Ok(p.commutator(&q)?.relative_size(&p.commutator_magnitude(&q)?))
}

/// Eigenvalue of `L₂` on the normalized eigenfunction of the canonical `L₁`.
pub fn eigenvalue_series(l1: &DiffOp, l2: &DiffOp, depth: usize) -> Result<EigenvalueSeries> {
    let residual = commutator_residual(l1, l2)?;
    if residual > ALGEBRA_TOLERANCE {
        return Err(Error::NotCommuting { residual });
    }
    let eig = formal_eigenfunction(l1, depth)?;
    let m = l2.order();
    let vs = l2.coeffs().to_vec();
    let abs_vs: Vec<TaylorSeries> = vs.iter().map(abs_series).collect();
    let derivs: Vec<Vec<TaylorSeries>> = eig.xi.iter().map(|x| derivs_upto(x, m)).collect();
    let mags: Vec<Vec<TaylorSeries>> = eig.bounds.iter().map(|x| derivs_upto(x, m)).collect();
    let mut coeffs: Vec<C64> = Vec::with_capacity(depth + 1);
    let mut worst: f64 = 0.0;
    for p in 0..=depth {
        let all = |_: usize, _: usize, _: usize| true;
        let phi = conj_sum(&vs, &derivs, m, p, false, all).ok_or(Error::TruncationUnderflow { requested: p as i64, available: 0 })?;
        let mut bound = conj_sum(&abs_vs, &mags, m, p, true, all).ok_or(Error::TruncationUnderflow { requested: p as i64, available: 0 })?;
        if phi.is_empty() {
            return Err(Error::TruncationUnderflow { requested: p as i64, available: p as i64 - 1 });
        }
        coeffs.push(phi.value());
        let mut r = phi;
        for (q, &aq) in coeffs.iter().enumerate() {
            r = &r - &eig.xi[p - q].scale(aq);
            bound = &bound + &eig.bounds[p - q].scale(C64::new(aq.norm(), 0.0));
        }
        worst = worst.max(relative_to(&r, &bound));
    }
    if worst > ALGEBRA_TOLERANCE {
        return Err(Error::NotCommuting { residual: worst });
    }
    Ok(EigenvalueSeries { n: l1.order(), m, x0: l1.basepoint(), coeffs })
}

/// Commuting pair `(∂² + u₀, ∂³ + v₁∂ + v₀)` with `v₁ = (3/2)u₀ + c₁/2`,
/// `v₀ = (3/4)u₀′`, provided `¼u₀‴ + ((3/2)u₀ + c₁/2)u₀′ = 0`.
pub fn commuting_pair_2_3(u0: &TaylorSeries, c1: C64) -> Result<(DiffOp, DiffOp)> {
    let x0 = u0.basepoint();
    let order = u0.len().max(1) - 1;
    let half_c1 = TaylorSeries::constant(x0, c1 * 0.5, order);
    let v1 = &u0.scale(C64::new(1.5, 0.0)) + &half_c1;
    let d1 = u0.deriv();
    let a = u0.nth_deriv(3).scale(C64::new(0.25, 0.0));
    let b = &v1 * &d1;
    let r = &a + &b;
    let scale = a.max_abs().max(b.truncate(a.len().max(1) - 1).max_abs());
    let residual = if scale == 0.0 { 0.0 } else { r.max_abs() / scale };
    if residual > ALGEBRA_TOLERANCE {
        return Err(Error::NoSolution { residual });
    }
    let v0 = d1.scale(C64::new(0.75, 0.0));
    let zero = TaylorSeries::zero(x0, order);
    let l1 = DiffOp::monic(vec![u0.clone(), zero.clone()]);
    let l2 = DiffOp::monic(vec![v0, v1, zero]);
    Ok((l1, l2))
}
