//! Riemann theta functions.
//!
//! `θ(τ, z) = Σ_{n ∈ Z^g} exp(πi nᵗτn + 2πi nᵗz)`, with characteristics,
//! second-order thetas `Θ[ε](τ, z) = θ[ε;0](2τ, 2z)` and the Kummer map.
//! Sums run over the ellipsoid `(m - c)ᵗ Im τ (m - c) ≤ R²` around the real
//! saddle `c`; `R` comes from a Gaussian tail bound (see [`tail_bound`]).

mod characteristic;
mod divisor;
mod eval;
mod jet;
mod period;
mod truncation;

pub use characteristic::{all_characteristics, eps_from_index, even_characteristics, HalfCharacteristic};
pub use divisor::{segment_scale, theta_divisor_point, DivisorPoint, DIVISOR_TOLERANCE, NEWTON_STARTS, NEWTON_STEPS};
pub use eval::{
    kummer_vector, kummer_vector_jets, theta_char, theta_char_at_radius, theta_char_detailed, theta_char_jets, theta_eval,
    theta_eval_detailed, theta_jets, theta_second_order, theta_taylor, ThetaTaylor, ThetaValue,
};
pub use jet::{DirectionalJet, MAX_JET_ORDER};
pub use period::{validate_period_matrix, PeriodMatrix};
pub use truncation::{tail_bound, truncation_radius, TruncationPolicy};
