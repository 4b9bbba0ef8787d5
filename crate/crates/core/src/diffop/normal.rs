use crate::error::{Error, Result};
use crate::C64;

use super::op::DiffOp;
use super::series::TaylorSeries;

/// How an order-2 operator is brought to `∂² + u`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NormalFormMode {
    /// Divide the equation `Lψ = 0` by `u₂`, then conjugate away `∂¹`.
    #[default]
    Equation,
    /// Change variable to `t = ∫ u₂^{−1/2}`, then conjugate; keeps the spectrum of `L`.
    Operator,
}

/// Data of the Kummer–Liouville transformation.
///
/// The canonical operator is `φ⁻¹ ∘ λ ∘ L ∘ φ` written in the variable `t`,
/// where `λ` is multiplication by `left_factor`.
#[derive(Clone, Debug)]
pub struct NormalFormRecord {
    pub mode: NormalFormMode,
    /// `1/u₂` in equation mode, `1` in operator mode (function of `x`).
    pub left_factor: TaylorSeries,
    /// Conjugating factor `φ(x)` with `φ(x₀) = 1`.
    pub conjugation: TaylorSeries,
    /// `t(x)` at `x₀`, with `t(x₀) = 0` in operator mode.
    pub t_of_x: TaylorSeries,
    /// Inverse change of variable `x(t)`.
    pub x_of_t: TaylorSeries,
}

/// Bring `u₂∂² + u₁∂ + u₀` to `∂² + u`.
pub fn normal_form_order2(l: &DiffOp, mode: NormalFormMode) -> Result<(DiffOp, NormalFormRecord)> {
    if l.order() != 2 {
        return Err(Error::InvalidArgument(format!("expected an order-2 operator, got order {}", l.order())));
    }
    let (u0, u1, u2) = (l.coeff(0), l.coeff(1), l.coeff(2));
    let x0 = l.basepoint();
    if u2.value().norm() == 0.0 {
        return Err(Error::NonUnitLeadingCoefficient);
    }
    let half = C64::new(0.5, 0.0);
    match mode {
        NormalFormMode::Equation => {
            let inv = u2.recip()?;
            let p = u1 * &inv;
            let q = u0 * &inv;
            let u = &(&q - &(&p * &p).scale(C64::new(0.25, 0.0))) - &p.deriv().scale(half);
            let phi = p.integrate().scale(-half).exp();
            let id = TaylorSeries::identity(x0, u.len().max(1) - 1);
            let record = NormalFormRecord { mode, left_factor: inv, conjugation: phi, t_of_x: id.clone(), x_of_t: id };
            Ok((DiffOp::monic(vec![u.clone(), TaylorSeries::zero(x0, u.len().max(1) - 1)]), record))
        }
        NormalFormMode::Operator => {
            let s = u2.sqrt()?;
            let s_inv = s.recip()?;
            let big_p = &(u1 - &u2.deriv().scale(half)) * &s_inv;
            // d/dt = √u₂ d/dx
            let dp_dt = &big_p.deriv() * &s;
            let u_x = &(&(u0 - &(&big_p * &big_p).scale(C64::new(0.25, 0.0))) - &dp_dt.scale(half)).truncate(dp_dt.len().max(1) - 1);
            let t_of_x = s_inv.integrate();
            let x_of_t = t_of_x.reversion()?;
            let u_t = u_x.compose(&x_of_t.truncate(u_x.len().max(1) - 1))?;
            let phi = (&big_p * &s_inv).integrate().scale(-half).exp();
            let one = TaylorSeries::constant(x0, C64::new(1.0, 0.0), u2.len().max(1) - 1);
            let record = NormalFormRecord { mode, left_factor: one, conjugation: phi, t_of_x, x_of_t };
            let t0 = u_t.basepoint();
            Ok((DiffOp::monic(vec![u_t.clone(), TaylorSeries::zero(t0, u_t.len().max(1) - 1)]), record))
        }
    }
}
