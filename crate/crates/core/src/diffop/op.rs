use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::C64;

use super::series::{binomial, TaylorSeries};

/// Default ∂-depth: pseudo-differential products are kept down to `∂^{−12}`.
pub const DEPTH: i64 = 12;

/// `Σ_{p = low}^{top} a_p(x) ∂^p` with truncated Taylor coefficients.
///
/// When `truncated` is set, powers below `low` are unknown; otherwise they
/// are exactly zero.
#[derive(Clone, Debug, PartialEq)]
pub struct PseudoDiffOp {
    x0: C64,
    top: i64,
    /// `coeffs[i]` multiplies `∂^{top − i}`.
    coeffs: Vec<TaylorSeries>,
    truncated: bool,
}

fn accumulate(slot: &mut Option<TaylorSeries>, term: TaylorSeries) {
    *slot = Some(match slot.take() {
        Some(s) => &s + &term,
        None => term,
    });
}

impl PseudoDiffOp {
    /// Coefficients ordered from `∂^top` downwards.
    pub fn new(top: i64, coeffs: Vec<TaylorSeries>, truncated: bool) -> Result<Self> {
        let x0 = coeffs.first().map(|c| c.basepoint()).ok_or_else(|| Error::InvalidArgument("operator needs at least one coefficient".into()))?;
        if coeffs.iter().any(|c| c.basepoint() != x0) {
            return Err(Error::InvalidArgument("coefficients expanded at different basepoints".into()));
        }
        Ok(PseudoDiffOp { x0, top, coeffs, truncated })
    }

    /// The exact operator `f ∂^p`.
    pub fn monomial(f: TaylorSeries, p: i64) -> Self {
        PseudoDiffOp { x0: f.basepoint(), top: p, coeffs: vec![f], truncated: false }
    }

    /// `∂^p` with constant coefficient 1 known to series order `order`.
    pub fn d_pow(x0: C64, p: i64, order: usize) -> Self {
        Self::monomial(TaylorSeries::constant(x0, C64::new(1.0, 0.0), order), p)
    }

    pub fn identity(x0: C64, order: usize) -> Self {
        Self::d_pow(x0, 0, order)
    }

    /// Multiplication by `f`.
    pub fn mul_fn(f: TaylorSeries) -> Self {
        Self::monomial(f, 0)
    }

    pub fn basepoint(&self) -> C64 {
        self.x0
    }

    pub fn top(&self) -> i64 {
        self.top
    }

    pub fn low(&self) -> i64 {
        self.top - self.coeffs.len() as i64 + 1
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    /// Lowest power whose coefficient is known (`i64::MIN` for a finite operator).
    pub fn reliable_floor(&self) -> i64 {
        if self.truncated {
            self.low()
        } else {
            i64::MIN
        }
    }

    /// Stored coefficient of `∂^p`.
    pub fn coeff(&self, p: i64) -> Option<&TaylorSeries> {
        if p > self.top || p < self.low() {
            return None;
        }
        self.coeffs.get((self.top - p) as usize)
    }

    /// Coefficient of `∂^p`, zero outside the stored range of a finite operator.
    pub fn coeff_or_zero(&self, p: i64) -> Result<TaylorSeries> {
        if let Some(c) = self.coeff(p) {
            return Ok(c.clone());
        }
        if p < self.low() && self.truncated {
            return Err(Error::TruncationUnderflow { requested: p, available: self.low() });
        }
        Ok(TaylorSeries::zero(self.x0, self.series_order()))
    }

    /// `(power, coefficient)` pairs from the top down.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &TaylorSeries)> {
        self.coeffs.iter().enumerate().map(move |(i, c)| (self.top - i as i64, c))
    }

    /// Largest series order among the coefficients.
    pub fn series_order(&self) -> usize {
        self.coeffs.iter().map(|c| c.len()).max().unwrap_or(1).max(1) - 1
    }

    /// Largest coefficient magnitude over all powers and series orders.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }

    fn has_negative_powers(&self) -> bool {
        self.terms().any(|(p, c)| p < 0 && c.max_abs() > 0.0)
    }

    pub fn scale(&self, k: C64) -> Self {
        PseudoDiffOp { coeffs: self.coeffs.iter().map(|c| c.scale(k)).collect(), ..self.clone() }
    }

    fn combine(&self, other: &Self, sign: f64) -> Result<Self> {
        if self.x0 != other.x0 {
            return Err(Error::InvalidArgument("operators expanded at different basepoints".into()));
        }
        let top = self.top.max(other.top);
        let mut low = self.low().min(other.low());
        for op in [self, other] {
            if op.truncated {
                low = low.max(op.low());
            }
        }
        let order = self.series_order().max(other.series_order());
        let pick = |op: &Self, p: i64| op.coeff(p).cloned().unwrap_or_else(|| TaylorSeries::zero(self.x0, order));
        let coeffs = (low..=top)
            .rev()
            .map(|p| &pick(self, p) + &pick(other, p).scale(C64::new(sign, 0.0)))
            .collect();
        Ok(PseudoDiffOp { x0: self.x0, top, coeffs, truncated: self.truncated || other.truncated })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -1.0)
    }

    /// Lowest power of `self ∘ other` that the operands determine.
    pub fn product_floor(&self, other: &Self) -> i64 {
        let mut floor = i64::MIN;
        if self.truncated {
            floor = floor.max(self.low() + other.top);
        }
        if other.truncated {
            floor = floor.max(self.top + other.low());
        }
        floor
    }

    /// Lowest power of `self ∘ other` when no terms were ever dropped (ignoring
    /// the infinite tails of negative powers).
    fn exact_floor(&self, other: &Self) -> i64 {
        other.low() + self.low().min(0)
    }

    /// `self ∘ other` down to the default depth.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let reliable = self.product_floor(other);
        let exact = self.exact_floor(other);
        let floor = if self.has_negative_powers() { reliable.max(exact.min(-DEPTH)) } else { reliable.max(exact) };
        self.compose_to(other, floor)
    }

    /// `self ∘ other` keeping powers `≥ floor`, by the generalized Leibniz rule
    /// `∂^i ∘ q = Σ_k C(i, k) q^{(k)} ∂^{i−k}`.
    pub fn compose_to(&self, other: &Self, floor: i64) -> Result<Self> {
        self.leibniz(other, floor, false)
    }

    /// Coefficientwise magnitudes `|a_p|`.
    pub fn abs(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| TaylorSeries::new(self.x0, c.coeffs().iter().map(|v| C64::new(v.norm(), 0.0)).collect()))
            .collect();
        PseudoDiffOp { coeffs, ..self.clone() }
    }

    /// Term-magnitude bound for `self ∘ other`: the product of `|self|` and
    /// `|other|` with `|C(i, k)|`, bounding every summand of each coefficient.
    pub fn compose_magnitude(&self, other: &Self) -> Result<Self> {
        let reliable = self.product_floor(other);
        let exact = self.exact_floor(other);
        let floor = if self.has_negative_powers() { reliable.max(exact.min(-DEPTH)) } else { reliable.max(exact) };
        self.abs().leibniz(&other.abs(), floor, true)
    }

    /// Largest `|a_{p,j}| / bound_{p,j}` over the positions both operators carry.
    pub fn relative_size(&self, bound: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for (p, c) in self.terms() {
            let Some(b) = bound.coeff(p) else { continue };
            for (v, w) in c.coeffs().iter().zip(b.coeffs()) {
                if v.norm() > 0.0 {
                    m = m.max(v.norm() / w.norm().max(f64::MIN_POSITIVE));
                }
            }
        }
        m
    }

    fn leibniz(&self, other: &Self, floor: i64, magnitude: bool) -> Result<Self> {
        if self.x0 != other.x0 {
            return Err(Error::InvalidArgument("operators expanded at different basepoints".into()));
        }
        let reliable = self.product_floor(other);
        if floor < reliable {
            return Err(Error::TruncationUnderflow { requested: floor, available: reliable });
        }
        let top = self.top + other.top;
        if floor > top {
            return Ok(PseudoDiffOp {
                x0: self.x0,
                top: floor,
                coeffs: vec![TaylorSeries::zero(self.x0, self.series_order())],
                truncated: true,
            });
        }
        let mut acc: Vec<Option<TaylorSeries>> = vec![None; (top - floor + 1) as usize];
        let mut derivs: HashMap<i64, Vec<TaylorSeries>> = HashMap::new();
        for (i, p) in self.terms() {
            if p.max_abs() == 0.0 {
                continue;
            }
            for (j, q) in other.terms() {
                let ds = derivs.entry(j).or_insert_with(|| vec![q.clone()]);
                let mut k = 0usize;
                while i + j - k as i64 >= floor && (i < 0 || k as i64 <= i) {
                    while ds.len() <= k {
                        let next = ds.last().map(|d| d.deriv()).unwrap_or_else(|| q.clone());
                        let next = if magnitude { TaylorSeries::new(next.basepoint(), next.coeffs().iter().map(|v| C64::new(v.norm(), 0.0)).collect()) } else { next };
                        ds.push(next);
                    }
                    let c = if magnitude { binomial(i as f64, k).abs() } else { binomial(i as f64, k) };
                    let term = (p * &ds[k]).scale(C64::new(c, 0.0));
                    accumulate(&mut acc[(top - (i + j - k as i64)) as usize], term);
                    k += 1;
                }
            }
        }
        let order = self.series_order().min(other.series_order());
        let coeffs = acc.into_iter().map(|c| c.unwrap_or_else(|| TaylorSeries::zero(self.x0, order))).collect();
        let truncated = self.truncated || other.truncated || self.has_negative_powers() || floor > self.exact_floor(other);
        Ok(PseudoDiffOp { x0: self.x0, top, coeffs, truncated })
    }

    /// `self ∘ other − other ∘ self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let a = self.compose(other)?;
        let b = other.compose(self)?;
        let floor = a.reliable_floor().max(b.reliable_floor());
        let trim = |op: &Self| -> Result<Self> {
            if floor > op.low() {
                op.restrict(floor)
            } else {
                Ok(op.clone())
            }
        };
        trim(&a)?.sub(&trim(&b)?)
    }

    /// Term-magnitude bound for the commutator.
    pub fn commutator_magnitude(&self, other: &Self) -> Result<Self> {
        let a = self.compose_magnitude(other)?;
        let b = other.compose_magnitude(self)?;
        let floor = a.reliable_floor().max(b.reliable_floor());
        let a = if floor > a.low() { a.restrict(floor)? } else { a };
        let b = if floor > b.low() { b.restrict(floor)? } else { b };
        a.add(&b)
    }

    /// Keep powers `≥ floor` (marks the result truncated when terms are dropped).
    pub fn restrict(&self, floor: i64) -> Result<Self> {
        if floor < self.reliable_floor() {
            return Err(Error::TruncationUnderflow { requested: floor, available: self.low() });
        }
        if floor <= self.low() {
            return Ok(self.clone());
        }
        if floor > self.top {
            return Ok(PseudoDiffOp { x0: self.x0, top: floor, coeffs: vec![TaylorSeries::zero(self.x0, self.series_order())], truncated: true });
        }
        let keep = (self.top - floor + 1) as usize;
        Ok(PseudoDiffOp { x0: self.x0, top: self.top, coeffs: self.coeffs[..keep].to_vec(), truncated: true })
    }

    /// Non-negative part `(P)₊` as a differential operator.
    pub fn plus_part(&self) -> Result<DiffOp> {
        if self.truncated && self.low() > 0 {
            return Err(Error::TruncationUnderflow { requested: 0, available: self.low() });
        }
        if self.top < 0 {
            return Ok(DiffOp::new(vec![TaylorSeries::zero(self.x0, self.series_order())]));
        }
        let coeffs = (0..=self.top).map(|p| self.coeff_or_zero(p)).collect::<Result<Vec<_>>>()?;
        Ok(DiffOp::new(coeffs))
    }

    /// Coefficient of `∂^{−1}`.
    pub fn residue(&self) -> Result<TaylorSeries> {
        self.coeff_or_zero(-1)
    }

    /// Largest coefficient difference over the powers and series orders both operands determine.
    pub fn max_diff(&self, other: &Self) -> f64 {
        let floor = self.reliable_floor().max(other.reliable_floor());
        let top = self.top.max(other.top);
        let lo = floor.max(self.low().min(other.low()));
        let mut m: f64 = 0.0;
        for p in lo..=top {
            let d = match (self.coeff(p), other.coeff(p)) {
                (Some(a), Some(b)) => a.max_diff(b),
                (Some(a), None) => a.max_abs(),
                (None, Some(b)) => b.max_abs(),
                (None, None) => 0.0,
            };
            m = m.max(d);
        }
        m
    }

    /// `n`-fold composition.
    pub fn pow(&self, n: usize) -> Result<Self> {
        let mut out = PseudoDiffOp::identity(self.x0, self.series_order());
        for _ in 0..n {
            out = out.compose(self)?;
        }
        Ok(out)
    }
}

/// Differential operator `Σ_{i=0}^{n} u_i(x) ∂^i`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffOp {
    /// `coeffs[i] = u_i`.
    coeffs: Vec<TaylorSeries>,
}

impl DiffOp {
    /// Coefficients `u_0, …, u_n` in increasing power.
    pub fn new(coeffs: Vec<TaylorSeries>) -> Self {
        assert!(!coeffs.is_empty(), "a differential operator needs at least u_0");
        DiffOp { coeffs }
    }

    /// `∂^n + Σ_{i<n} u_i ∂^i` from the lower coefficients.
    pub fn monic(lower: Vec<TaylorSeries>) -> Self {
        let x0 = lower[0].basepoint();
        let order = lower.iter().map(|c| c.len()).max().unwrap_or(1).max(1) - 1;
        let mut coeffs = lower;
        coeffs.push(TaylorSeries::constant(x0, C64::new(1.0, 0.0), order));
        DiffOp { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn basepoint(&self) -> C64 {
        self.coeffs[0].basepoint()
    }

    /// `u_i`.
    pub fn coeff(&self, i: usize) -> &TaylorSeries {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[TaylorSeries] {
        &self.coeffs
    }

    pub fn to_pseudo(&self) -> PseudoDiffOp {
        PseudoDiffOp { x0: self.basepoint(), top: self.order() as i64, coeffs: self.coeffs.iter().rev().cloned().collect(), truncated: false }
    }

    pub fn compose(&self, other: &DiffOp) -> Result<DiffOp> {
        self.to_pseudo().compose(&other.to_pseudo())?.plus_part()
    }

    pub fn commutator(&self, other: &DiffOp) -> Result<DiffOp> {
        self.to_pseudo().commutator(&other.to_pseudo())?.plus_part()
    }

    pub fn add(&self, other: &DiffOp) -> Result<DiffOp> {
        self.to_pseudo().add(&other.to_pseudo())?.plus_part()
    }

    pub fn scale(&self, k: C64) -> DiffOp {
        DiffOp { coeffs: self.coeffs.iter().map(|c| c.scale(k)).collect() }
    }

    /// `Σ u_i f^{(i)}`.
    pub fn apply(&self, f: &TaylorSeries) -> TaylorSeries {
        let mut d = f.clone();
        let mut out: Option<TaylorSeries> = None;
        for u in &self.coeffs {
            accumulate(&mut out, u * &d);
            d = d.deriv();
        }
        out.unwrap_or_else(|| f.clone())
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }

    pub fn pow(&self, n: usize) -> Result<DiffOp> {
        self.to_pseudo().pow(n)?.plus_part()
    }
}
