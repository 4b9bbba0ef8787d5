use crate::error::{Error, Result};
use crate::C64;

use super::series::{BiSeries, TaylorSeries};

/// Relative size below which a residue counts as zero.
pub const RESIDUE_TOLERANCE: f64 = 1e-9;

/// Largest degree of a stored pole path.
pub const MAX_PATH_DEGREE: usize = 8;

/// `ξ₀ = 1`, `2∂ₓξ_{s+1} = ∂_yξ_s − ∂ₓ²ξ_s − (u − b)ξ_s`, with `ξ_{s+1} = 0` on `x = x₀`.
pub fn wave_recursion(u: &BiSeries, b: C64, depth: usize) -> Result<Vec<BiSeries>> {
    let (x0, y0) = u.basepoint();
    let (n, m) = u.orders().ok_or(Error::TruncationUnderflow { requested: 0, available: -1 })?;
    let ub = &u.clone() - &BiSeries::constant(x0, y0, b, n, m);
    let mut xi = vec![BiSeries::constant(x0, y0, C64::new(1.0, 0.0), n, m)];
    for s in 0..depth {
        let cur = &xi[s];
        let rhs = &(&cur.dy() - &cur.dx().dx()) - &(&ub * cur);
        let next = rhs.integrate_x().scale(C64::new(0.5, 0.0));
        if next.orders().is_none() {
            return Err(Error::TruncationUnderflow { requested: s as i64 + 1, available: s as i64 });
        }
        xi.push(next);
    }
    Ok(xi)
}

/// Finite Laurent polynomial `Σ_j r_j(y) σ^j` in `σ = x − x̃(y)` with `y`-series coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSeries {
    low: i64,
    coeffs: Vec<TaylorSeries>,
}

impl LaurentSeries {
    fn high(&self) -> i64 {
        self.low + self.coeffs.len() as i64 - 1
    }

    /// Lowest stored power.
    pub fn low(&self) -> i64 {
        self.low
    }

    /// `r_j(y)`, the coefficient of `σ^j`.
    pub fn r(&self, j: i64) -> TaylorSeries {
        if j < self.low || j > self.high() {
            let y0 = self.coeffs[0].basepoint();
            return TaylorSeries::zero(y0, self.y_order());
        }
        self.coeffs[(j - self.low) as usize].clone()
    }

    fn y_order(&self) -> usize {
        self.coeffs.iter().map(|c| c.len()).min().unwrap_or(1).max(1) - 1
    }

    /// Order of the pole at `σ = 0` (coefficients below `tol · scale` count as zero).
    pub fn pole_order(&self, tol: f64) -> usize {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        (self.low..0).find(|&j| self.r(j).max_abs() > tol * scale).map_or(0, |j| (-j) as usize)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }

    fn map_range(low: i64, high: i64, f: impl Fn(i64) -> TaylorSeries) -> Self {
        LaurentSeries { low, coeffs: (low..=high).map(f).collect() }
    }

    fn add(&self, o: &Self) -> Self {
        Self::map_range(self.low.min(o.low), self.high().max(o.high()), |j| &self.r(j) + &o.r(j))
    }

    fn sub(&self, o: &Self) -> Self {
        Self::map_range(self.low.min(o.low), self.high().max(o.high()), |j| &self.r(j) - &o.r(j))
    }

    fn scale(&self, k: C64) -> Self {
        LaurentSeries { low: self.low, coeffs: self.coeffs.iter().map(|c| c.scale(k)).collect() }
    }

    fn mul(&self, o: &Self) -> Self {
        let y0 = self.coeffs[0].basepoint();
        let order = self.y_order().min(o.y_order());
        let low = self.low + o.low;
        let mut out: Vec<TaylorSeries> = vec![TaylorSeries::zero(y0, order); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        LaurentSeries { low, coeffs: out }
    }

    /// Multiply by a function of `y` alone.
    fn mul_y(&self, f: &TaylorSeries) -> Self {
        LaurentSeries { low: self.low, coeffs: self.coeffs.iter().map(|c| c * f).collect() }
    }

    fn d_sigma(&self) -> Self {
        Self::map_range(self.low - 1, self.high() - 1, |j| self.r(j + 1).scale(C64::new((j + 1) as f64, 0.0)))
    }

    fn d_y_fixed_sigma(&self) -> Self {
        LaurentSeries { low: self.low, coeffs: self.coeffs.iter().map(|c| c.deriv()).collect() }
    }

    /// Antiderivative in `σ` with zero constant term; the residue must vanish.
    fn integrate_sigma(&self) -> Self {
        let y0 = self.coeffs[0].basepoint();
        let order = self.y_order();
        Self::map_range(self.low.min(-1) + 1, (self.high() + 1).max(0), |j| {
            if j == 0 {
                TaylorSeries::zero(y0, order)
            } else {
                self.r(j - 1).scale(C64::new(1.0 / j as f64, 0.0))
            }
        })
    }
}

/// `u = −2σ⁻² + v(y) + w(y)σ + Σ_{j≥2} u_j(y)σ^j` around a moving pole `x̃(y)`.
#[derive(Clone, Debug)]
pub struct LaurentAmbient {
    /// Pole path `x̃(y)`, a polynomial of degree at most 8 in `y − y₀`.
    pub path: TaylorSeries,
    pub v: TaylorSeries,
    pub w: TaylorSeries,
    /// `u_2, u_3, …`.
    pub higher: Vec<TaylorSeries>,
}

impl LaurentAmbient {
    /// Ambient data with an explicit `w`.
    pub fn new(path: &[C64], y0: C64, v: TaylorSeries, w: TaylorSeries, higher: Vec<TaylorSeries>) -> Result<Self> {
        if path.len() > MAX_PATH_DEGREE + 1 {
            return Err(Error::InvalidArgument(format!("pole path degree {} exceeds {MAX_PATH_DEGREE}", path.len() - 1)));
        }
        let order = std::iter::once(&v).chain(std::iter::once(&w)).chain(&higher).map(|s| s.len()).min().unwrap_or(1).max(1) - 1;
        let mut c = path.to_vec();
        c.resize(order.max(path.len()) + 1, C64::new(0.0, 0.0));
        if [&v, &w].iter().chain(higher.iter().collect::<Vec<_>>().iter()).any(|s| s.basepoint() != y0) {
            return Err(Error::InvalidArgument("ambient series expanded at different basepoints".into()));
        }
        Ok(LaurentAmbient { path: TaylorSeries::new(y0, c), v, w, higher })
    }

    /// Ambient data whose `w` satisfies `ẍ̃ = −2w`.
    pub fn with_pole_condition(path: &[C64], y0: C64, v: TaylorSeries, higher: Vec<TaylorSeries>) -> Result<Self> {
        let order = v.len().max(1) - 1;
        let mut c = path.to_vec();
        c.resize(order + 3, C64::new(0.0, 0.0));
        let w = TaylorSeries::new(y0, c).nth_deriv(2).scale(C64::new(-0.5, 0.0)).truncate(order);
        Self::new(path, y0, v, w, higher)
    }

    pub fn basepoint(&self) -> C64 {
        self.path.basepoint()
    }

    /// `u − b` as a Laurent polynomial in `σ`.
    fn shifted_potential(&self, b: C64) -> LaurentSeries {
        let y0 = self.basepoint();
        let order = self.v.len().min(self.w.len()).max(1) - 1;
        let mut coeffs = vec![
            TaylorSeries::constant(y0, C64::new(-2.0, 0.0), order),
            TaylorSeries::zero(y0, order),
            &self.v - &TaylorSeries::constant(y0, b, order),
            self.w.clone(),
        ];
        coeffs.extend(self.higher.iter().cloned());
        LaurentSeries { low: -2, coeffs }
    }

    /// Largest `|ẍ̃ + 2w|` over the known `y`-orders.
    pub fn pole_condition_defect(&self) -> f64 {
        let lhs = &self.path.nth_deriv(2) + &self.w.scale(C64::new(2.0, 0.0));
        lhs.max_abs()
    }
}

/// Wave recursion around a moving pole: `ξ_s` as Laurent polynomials in `x − x̃(y)`.
#[derive(Clone, Debug)]
pub struct LaurentFamily {
    pub path: TaylorSeries,
    /// `ξ₀, …, ξ_S`.
    pub xi: Vec<LaurentSeries>,
    /// Relative size of the `σ⁻¹` coefficient of each right-hand side, `s = 0..S−1`.
    pub residues: Vec<f64>,
    /// Largest pole order over all `ξ_s`.
    pub max_pole_order: usize,
}

impl LaurentFamily {
    /// `ṙ_{s,−1} − (v − b) r_{s,−1} + 2 r_{s,1}`.
    pub fn residue_identity(&self, ambient: &LaurentAmbient, b: C64, s: usize) -> TaylorSeries {
        let xi = &self.xi[s];
        let y0 = ambient.basepoint();
        let vb = &ambient.v - &TaylorSeries::constant(y0, b, ambient.v.len().max(1) - 1);
        let rm1 = xi.r(-1);
        &(&rm1.deriv() - &(&vb * &rm1)) + &xi.r(1).scale(C64::new(2.0, 0.0))
    }
}

/// Laurent form of the wave recursion. Fails with `ResidueObstruction` at the
/// first `s` whose equation for `ξ_s` has a nonzero `σ⁻¹` term.
pub fn wave_recursion_laurent(ambient: &LaurentAmbient, b: C64, depth: usize) -> Result<LaurentFamily> {
    let y0 = ambient.basepoint();
    let order = ambient.v.len().min(ambient.w.len()).max(1) - 1;
    let ub = ambient.shifted_potential(b);
    let xdot = ambient.path.deriv();
    let mut xi = vec![LaurentSeries { low: 0, coeffs: vec![TaylorSeries::constant(y0, C64::new(1.0, 0.0), order)] }];
    let mut residues = Vec::new();
    for s in 0..depth {
        let cur = &xi[s];
        let ds = cur.d_sigma();
        // ∂_y at fixed x = ∂_y at fixed σ − ẋ̃ ∂_σ
        let dy = cur.d_y_fixed_sigma().sub(&ds.mul_y(&xdot));
        let terms = [dy, ds.d_sigma().scale(C64::new(-1.0, 0.0)), ub.mul(cur).scale(C64::new(-1.0, 0.0))];
        let rhs = terms[1..].iter().fold(terms[0].clone(), |acc, t| acc.add(t));
        if rhs.coeffs.iter().any(|c| c.is_empty()) {
            return Err(Error::TruncationUnderflow { requested: s as i64 + 1, available: s as i64 });
        }
        let scale = terms.iter().map(|t| t.max_abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let residue = rhs.r(-1).max_abs() / scale;
        residues.push(residue);
        if residue > RESIDUE_TOLERANCE {
            return Err(Error::ResidueObstruction { s: s + 1, residue });
        }
        let cubic = (rhs.low()..-2).map(|j| rhs.r(j).max_abs()).fold(0.0, f64::max) / scale;
        if cubic > RESIDUE_TOLERANCE {
            return Err(Error::InvariantViolation(format!("pole of order {} in the equation for xi_{}", -rhs.low(), s + 1)));
        }
        let next = rhs.integrate_sigma().scale(C64::new(0.5, 0.0));
        // powers below −1 were certified zero above
        let keep = (-1 - next.low).max(0) as usize;
        xi.push(LaurentSeries { low: next.low.max(-1), coeffs: next.coeffs[keep..].to_vec() });
    }
    let max_pole_order = xi.iter().map(|x| x.pole_order(RESIDUE_TOLERANCE)).max().unwrap_or(0);
    Ok(LaurentFamily { path: ambient.path.clone(), xi, residues, max_pole_order })
}
