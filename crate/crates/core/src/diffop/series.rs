use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::C64;

/// Default series truncation order.
pub const SERIES_ORDER: usize = 24;

/// Truncated Taylor series `Σ_{j ≤ N} c_j (x − x₀)^j`.
///
/// The order `N` is the last known coefficient; arithmetic keeps the smaller
/// order of its operands and differentiation lowers it by one, so every
/// stored coefficient is exact. An empty series carries no information.
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorSeries {
    x0: C64,
    c: Vec<C64>,
}

/// `C(a, k) = a(a−1)⋯(a−k+1)/k!` for real `a`.
pub fn binomial(a: f64, k: usize) -> f64 {
    let mut r = 1.0;
    for j in 0..k {
        r *= (a - j as f64) / (j + 1) as f64;
    }
    r
}

impl TaylorSeries {
    pub fn new(x0: C64, coeffs: Vec<C64>) -> Self {
        TaylorSeries { x0, c: coeffs }
    }

    pub fn zero(x0: C64, order: usize) -> Self {
        TaylorSeries { x0, c: vec![C64::new(0.0, 0.0); order + 1] }
    }

    pub fn constant(x0: C64, value: C64, order: usize) -> Self {
        let mut s = Self::zero(x0, order);
        s.c[0] = value;
        s
    }

    /// The coordinate function `x`.
    pub fn identity(x0: C64, order: usize) -> Self {
        let mut s = Self::constant(x0, x0, order);
        if order >= 1 {
            s.c[1] = C64::new(1.0, 0.0);
        }
        s
    }

    /// `x^k` expanded at `x₀` (`x₀ ≠ 0` unless `k` is a non-negative integer).
    pub fn power(x0: C64, k: f64, order: usize) -> Self {
        let base = x0.powf(k);
        let c = (0..=order).map(|j| base * binomial(k, j) / x0.powi(j as i32)).collect();
        TaylorSeries { x0, c }
    }

    /// Polynomial `Σ p_j x^j` (coefficients in the global variable) at `x₀`.
    pub fn polynomial(x0: C64, p: &[C64], order: usize) -> Self {
        let mut out = Self::zero(x0, order);
        let mut xp = Self::constant(x0, C64::new(1.0, 0.0), order);
        let x = Self::identity(x0, order);
        for &a in p {
            out = &out + &xp.scale(a);
            xp = &xp * &x;
        }
        out
    }

    pub fn basepoint(&self) -> C64 {
        self.x0
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.c
    }

    /// Last known order, `None` for an empty series.
    pub fn order(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn coeff(&self, j: usize) -> C64 {
        self.c.get(j).copied().unwrap_or_default()
    }

    pub fn value(&self) -> C64 {
        self.coeff(0)
    }

    /// Keep orders `≤ order`.
    pub fn truncate(&self, order: usize) -> Self {
        TaylorSeries { x0: self.x0, c: self.c.iter().take(order + 1).copied().collect() }
    }

    pub fn scale(&self, k: C64) -> Self {
        TaylorSeries { x0: self.x0, c: self.c.iter().map(|x| x * k).collect() }
    }

    pub fn deriv(&self) -> Self {
        TaylorSeries { x0: self.x0, c: self.c.iter().enumerate().skip(1).map(|(j, x)| x * j as f64).collect() }
    }

    pub fn nth_deriv(&self, k: usize) -> Self {
        let mut s = self.clone();
        for _ in 0..k {
            s = s.deriv();
        }
        s
    }

    /// Antiderivative vanishing at `x₀`; the order grows by one.
    pub fn integrate(&self) -> Self {
        let mut c = Vec::with_capacity(self.c.len() + 1);
        c.push(C64::new(0.0, 0.0));
        c.extend(self.c.iter().enumerate().map(|(j, x)| x / (j + 1) as f64));
        TaylorSeries { x0: self.x0, c }
    }

    /// Evaluate the truncated polynomial at `x`.
    pub fn eval(&self, x: C64) -> C64 {
        let t = x - self.x0;
        self.c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &a| acc * t + a)
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// `1/f` for `f(x₀) ≠ 0`.
    pub fn recip(&self) -> Result<Self> {
        let a0 = self.value();
        if self.is_empty() || a0.norm() == 0.0 {
            return Err(Error::NonUnitLeadingCoefficient);
        }
        let n = self.c.len();
        let mut b = vec![C64::new(0.0, 0.0); n];
        b[0] = a0.inv();
        for k in 1..n {
            let s: C64 = (1..=k).map(|j| self.c[j] * b[k - j]).sum();
            b[k] = -s / a0;
        }
        Ok(TaylorSeries { x0: self.x0, c: b })
    }

    /// `f^p` for a unit `f`, principal branch at `x₀`.
    pub fn powf(&self, p: f64) -> Result<Self> {
        let a0 = self.value();
        if self.is_empty() || a0.norm() == 0.0 {
            return Err(Error::NonUnitLeadingCoefficient);
        }
        // J. C. P. Miller recurrence for (a0 (1 + h))^p
        let n = self.c.len();
        let mut b = vec![C64::new(0.0, 0.0); n];
        b[0] = a0.powf(p);
        for k in 1..n {
            let mut s = C64::new(0.0, 0.0);
            for j in 1..=k {
                s += self.c[j] * b[k - j] * (p * j as f64 - (k - j) as f64);
            }
            b[k] = s / (a0 * k as f64);
        }
        Ok(TaylorSeries { x0: self.x0, c: b })
    }

    pub fn sqrt(&self) -> Result<Self> {
        self.powf(0.5)
    }

    pub fn exp(&self) -> Self {
        let n = self.c.len();
        if n == 0 {
            return self.clone();
        }
        let d = self.deriv();
        let mut b = vec![C64::new(0.0, 0.0); n];
        b[0] = self.c[0].exp();
        // b' = f' b
        for k in 1..n {
            let s: C64 = (0..k).map(|j| d.coeff(j) * b[k - 1 - j]).sum();
            b[k] = s / k as f64;
        }
        TaylorSeries { x0: self.x0, c: b }
    }

    /// `self ∘ inner`, where `inner` is expanded at `t₀` with `inner(t₀) = x₀`.
    pub fn compose(&self, inner: &TaylorSeries) -> Result<Self> {
        if (inner.value() - self.x0).norm() > 1e-12 * (1.0 + self.x0.norm()) {
            return Err(Error::InvalidArgument("inner series must map its basepoint to the outer basepoint".into()));
        }
        let n = self.c.len().min(inner.c.len());
        let mut h = inner.truncate(n.saturating_sub(1));
        h.c[0] = C64::new(0.0, 0.0);
        let mut out = TaylorSeries::zero(inner.x0, n.saturating_sub(1));
        let mut hp = TaylorSeries::constant(inner.x0, C64::new(1.0, 0.0), n.saturating_sub(1));
        for j in 0..n {
            out = &out + &hp.scale(self.c[j]);
            hp = &hp * &h;
        }
        Ok(out)
    }

    /// Compositional inverse: `g` at `f(x₀)` with `g(f(x)) = x`; needs `f′(x₀) ≠ 0`.
    pub fn reversion(&self) -> Result<Self> {
        let n = self.c.len();
        if n < 2 || self.c[1].norm() == 0.0 {
            return Err(Error::NonUnitLeadingCoefficient);
        }
        let y0 = self.value();
        let mut g = TaylorSeries::identity(y0, n - 1);
        g.c[0] = self.x0;
        g.c[1] = self.c[1].inv();
        // Newton on g: g ← g − (f∘g − y)/f′∘g, doubling the correct order
        let mut known = 2;
        let fp = self.deriv();
        while known < n {
            let fg = self.compose(&g)?;
            let fpg = fp.compose(&g.truncate(fp.len().saturating_sub(1)))?;
            let y = TaylorSeries::identity(y0, n - 1);
            let err = &fg - &y;
            let corr = &err * &fpg.recip()?;
            g = &g - &corr;
            known *= 2;
        }
        Ok(g.truncate(n - 1))
    }

    /// Largest coefficient difference over the common known orders.
    pub fn max_diff(&self, other: &TaylorSeries) -> f64 {
        self.c.iter().zip(&other.c).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

impl Add for &TaylorSeries {
    type Output = TaylorSeries;
    fn add(self, o: &TaylorSeries) -> TaylorSeries {
        let n = self.c.len().min(o.c.len());
        TaylorSeries { x0: self.x0, c: (0..n).map(|j| self.c[j] + o.c[j]).collect() }
    }
}

impl Sub for &TaylorSeries {
    type Output = TaylorSeries;
    fn sub(self, o: &TaylorSeries) -> TaylorSeries {
        let n = self.c.len().min(o.c.len());
        TaylorSeries { x0: self.x0, c: (0..n).map(|j| self.c[j] - o.c[j]).collect() }
    }
}

impl Mul for &TaylorSeries {
    type Output = TaylorSeries;
    fn mul(self, o: &TaylorSeries) -> TaylorSeries {
        let n = self.c.len().min(o.c.len());
        let mut c = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            if self.c[i] == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n - i {
                c[i + j] += self.c[i] * o.c[j];
            }
        }
        TaylorSeries { x0: self.x0, c }
    }
}

impl Neg for &TaylorSeries {
    type Output = TaylorSeries;
    fn neg(self) -> TaylorSeries {
        self.scale(C64::new(-1.0, 0.0))
    }
}

/// Truncated bivariate series `Σ c_{ab} (x − x₀)^a (y − y₀)^b`, `a ≤ N`, `b ≤ M`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiSeries {
    x0: C64,
    y0: C64,
    nx: usize,
    ny: usize,
    /// Row-major in `a`: `c[a * ny + b]`, with `nx`, `ny` the coefficient counts.
    c: Vec<C64>,
}

impl BiSeries {
    /// Zero series with `N + 1` by `M + 1` coefficients.
    pub fn zero(x0: C64, y0: C64, n: usize, m: usize) -> Self {
        BiSeries { x0, y0, nx: n + 1, ny: m + 1, c: vec![C64::new(0.0, 0.0); (n + 1) * (m + 1)] }
    }

    pub fn from_fn(x0: C64, y0: C64, n: usize, m: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut s = Self::zero(x0, y0, n, m);
        for a in 0..=n {
            for b in 0..=m {
                s.c[a * s.ny + b] = f(a, b);
            }
        }
        s
    }

    pub fn constant(x0: C64, y0: C64, value: C64, n: usize, m: usize) -> Self {
        let mut s = Self::zero(x0, y0, n, m);
        s.c[0] = value;
        s
    }

    /// A series in `x` alone, constant in `y`.
    pub fn from_x(f: &TaylorSeries, y0: C64, m: usize) -> Self {
        let n = f.len().max(1) - 1;
        Self::from_fn(f.basepoint(), y0, n, m, |a, b| if b == 0 { f.coeff(a) } else { C64::new(0.0, 0.0) })
    }

    /// A series in `y` alone, constant in `x`.
    pub fn from_y(f: &TaylorSeries, x0: C64, n: usize) -> Self {
        let m = f.len().max(1) - 1;
        Self::from_fn(x0, f.basepoint(), n, m, |a, b| if a == 0 { f.coeff(b) } else { C64::new(0.0, 0.0) })
    }

    pub fn basepoint(&self) -> (C64, C64) {
        (self.x0, self.y0)
    }

    /// Known orders `(N, M)`; `None` when either axis is exhausted.
    pub fn orders(&self) -> Option<(usize, usize)> {
        Some((self.nx.checked_sub(1)?, self.ny.checked_sub(1)?))
    }

    pub fn coeff(&self, a: usize, b: usize) -> C64 {
        if a < self.nx && b < self.ny {
            self.c[a * self.ny + b]
        } else {
            C64::new(0.0, 0.0)
        }
    }

    fn reshape(&self, nx: usize, ny: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut c = Vec::with_capacity(nx * ny);
        for a in 0..nx {
            for b in 0..ny {
                c.push(f(a, b));
            }
        }
        BiSeries { x0: self.x0, y0: self.y0, nx, ny, c }
    }

    pub fn scale(&self, k: C64) -> Self {
        self.reshape(self.nx, self.ny, |a, b| self.coeff(a, b) * k)
    }

    pub fn dx(&self) -> Self {
        self.reshape(self.nx.saturating_sub(1), self.ny, |a, b| self.coeff(a + 1, b) * (a + 1) as f64)
    }

    pub fn dy(&self) -> Self {
        self.reshape(self.nx, self.ny.saturating_sub(1), |a, b| self.coeff(a, b + 1) * (b + 1) as f64)
    }

    /// Antiderivative in `x` vanishing on `x = x₀`.
    pub fn integrate_x(&self) -> Self {
        self.reshape(self.nx + 1, self.ny, |a, b| if a == 0 { C64::new(0.0, 0.0) } else { self.coeff(a - 1, b) / a as f64 })
    }

    /// Restriction to `y = y₀`.
    pub fn at_y0(&self) -> TaylorSeries {
        TaylorSeries::new(self.x0, (0..self.nx).map(|a| self.coeff(a, 0)).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn truncate(&self, n: usize, m: usize) -> Self {
        self.reshape(self.nx.min(n + 1), self.ny.min(m + 1), |a, b| self.coeff(a, b))
    }
}

impl Add for &BiSeries {
    type Output = BiSeries;
    fn add(self, o: &BiSeries) -> BiSeries {
        self.reshape(self.nx.min(o.nx), self.ny.min(o.ny), |a, b| self.coeff(a, b) + o.coeff(a, b))
    }
}

impl Sub for &BiSeries {
    type Output = BiSeries;
    fn sub(self, o: &BiSeries) -> BiSeries {
        self.reshape(self.nx.min(o.nx), self.ny.min(o.ny), |a, b| self.coeff(a, b) - o.coeff(a, b))
    }
}

impl Mul for &BiSeries {
    type Output = BiSeries;
    fn mul(self, o: &BiSeries) -> BiSeries {
        let (nx, ny) = (self.nx.min(o.nx), self.ny.min(o.ny));
        let mut out = self.reshape(nx, ny, |_, _| C64::new(0.0, 0.0));
        for a1 in 0..nx {
            for b1 in 0..ny {
                let p = self.coeff(a1, b1);
                if p == C64::new(0.0, 0.0) {
                    continue;
                }
                for a2 in 0..nx - a1 {
                    for b2 in 0..ny - b1 {
                        out.c[(a1 + a2) * ny + b1 + b2] += p * o.coeff(a2, b2);
                    }
                }
            }
        }
        out
    }
}
