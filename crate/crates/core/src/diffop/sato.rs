use crate::error::{Error, Result};
use crate::C64;

use super::op::{DiffOp, PseudoDiffOp, DEPTH};
use super::series::{BiSeries, TaylorSeries};

/// Dressing: returns `(W⁻¹, L = W ∘ ∂ ∘ W⁻¹)` for a monic `W = 1 + w₁∂⁻¹ + ⋯`.
pub fn dress(w: &PseudoDiffOp) -> Result<(PseudoDiffOp, PseudoDiffOp)> {
    dress_to_depth(w, DEPTH)
}

pub fn dress_to_depth(w: &PseudoDiffOp, depth: i64) -> Result<(PseudoDiffOp, PseudoDiffOp)> {
    let x0 = w.basepoint();
    let order = w.series_order();
    let lead = w.coeff(0).ok_or(Error::NotMonic)?;
    let one = TaylorSeries::constant(x0, C64::new(1.0, 0.0), order);
    if w.top() != 0 || lead.max_diff(&one) > 1e-12 {
        return Err(Error::NotMonic);
    }
    let id = PseudoDiffOp::identity(x0, order);
    // W⁻¹ = Σ_j (1 − W)^j; the j-th term starts at ∂^{−j}
    let nil = id.sub(w)?;
    let mut inv = id.clone();
    let mut term = id;
    for _ in 1..=depth {
        term = term.compose_to(&nil, -depth)?;
        inv = inv.add(&term)?;
    }
    let inv = inv.restrict(-depth)?;
    let d = PseudoDiffOp::d_pow(x0, 1, order);
    let l = w.compose(&d.compose(&inv)?)?;
    Ok((inv, l))
}

/// `B_n = (Lⁿ)₊` and `F_n = Res_∂ Lⁿ`.
pub fn power_plus_and_residue(l: &PseudoDiffOp, n: usize) -> Result<(DiffOp, TaylorSeries)> {
    if n == 0 {
        return Err(Error::InvalidArgument("power must be at least 1".into()));
    }
    let ln = l.pow(n)?;
    if ln.reliable_floor() > -1 {
        return Err(Error::TruncationUnderflow { requested: -1, available: ln.reliable_floor() });
    }
    Ok((ln.plus_part()?, ln.residue()?))
}

/// Which two-equation system `kp_pair_residual` evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum KpSystem {
    /// `u₂,t₂ = u₂,xx + 3u₃,x`,
    /// `2u₂,t₃ = 3(u₂,x + u₃)_t₂ − (u₂,xx − 3u₃,x + 3u₂²)_x`.
    #[default]
    Printed,
    /// `u₂,t₂ = u₂,xx + 2u₃,x`,
    /// `2u₂,t₃ = 3(u₂,x + u₃)_t₂ − (u₂,xx + 3u₃,x − 3u₂²)_x`,
    /// the Zakharov–Shabat equations of `L = ∂ + u₂∂⁻¹ + u₃∂⁻² + ⋯`.
    Lax,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KpEquation {
    First,
    Second,
}

/// Residual of one equation of the `(u₂, u₃)` system as a series, with its
/// largest coefficient relative to the largest participating term.
#[derive(Clone, Debug)]
pub struct KpPairResidual {
    pub series: BiSeries,
    pub residual: f64,
    pub normalizer: f64,
}

fn check_orders(s: &BiSeries, what: &str) -> Result<()> {
    if s.orders().is_none() {
        return Err(Error::InvalidArgument(format!("{what}: series exhausted by differentiation")));
    }
    Ok(())
}

/// Evaluate the first or second equation of the `(u₂, u₃)` system on series in
/// `(x, t₂)`; `u2_t3` supplies `∂_{t₃}u₂` on the same `(x, t₂)` patch.
pub fn kp_pair_residual(u2: &BiSeries, u3: &BiSeries, u2_t3: Option<&BiSeries>, equation: KpEquation, system: KpSystem) -> Result<KpPairResidual> {
    if u2.basepoint() != u3.basepoint() {
        return Err(Error::InvalidArgument("u2 and u3 expanded at different basepoints".into()));
    }
    let c = |v: f64| C64::new(v, 0.0);
    let terms: Vec<BiSeries> = match equation {
        KpEquation::First => {
            let k = if system == KpSystem::Printed { 3.0 } else { 2.0 };
            vec![u2.dy(), u2.dx().dx().scale(c(-1.0)), u3.dx().scale(c(-k))]
        }
        KpEquation::Second => {
            let t3 = u2_t3.ok_or_else(|| Error::InvalidArgument("second equation needs the t3-derivative of u2".into()))?;
            let (s_u3, s_sq) = if system == KpSystem::Printed { (-3.0, 3.0) } else { (3.0, -3.0) };
            let inner_x = &u2.dx().dx().dx() + &u3.dx().dx().scale(c(s_u3));
            vec![
                t3.scale(c(2.0)),
                u2.dx().dy().scale(c(-3.0)),
                u3.dy().scale(c(-3.0)),
                inner_x,
                (u2 * u2).dx().scale(c(s_sq)),
            ]
        }
    };
    let mut sum = terms[0].clone();
    for t in &terms[1..] {
        sum = &sum + t;
    }
    check_orders(&sum, "kp_pair_residual")?;
    let (n, m) = sum.orders().unwrap_or((0, 0));
    let normalizer = terms.iter().map(|t| t.truncate(n, m).max_abs()).fold(0.0, f64::max);
    let residual = if normalizer == 0.0 { 0.0 } else { sum.max_abs() / normalizer };
    Ok(KpPairResidual { series: sum, residual, normalizer })
}
