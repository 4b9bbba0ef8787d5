//! Truncated series and the calculus of (pseudo-)differential operators.
//!
//! Coefficients are Taylor series at a regular basepoint with honest order
//! bookkeeping; operators compose by the generalized Leibniz rule.

mod eigen;
mod normal;
mod op;
mod sato;
mod series;
mod wave;

pub use eigen::{
    commutator_residual, commuting_pair_2_3, eigenvalue_series, formal_eigenfunction, EigenSeries, EigenvalueSeries, ALGEBRA_TOLERANCE,
    EIGEN_DEPTH,
};
pub use normal::{normal_form_order2, NormalFormMode, NormalFormRecord};
pub use op::{DiffOp, PseudoDiffOp, DEPTH};
pub use sato::{dress, dress_to_depth, kp_pair_residual, power_plus_and_residue, KpEquation, KpPairResidual, KpSystem};
pub use series::{binomial, BiSeries, TaylorSeries, SERIES_ORDER};
pub use wave::{wave_recursion, wave_recursion_laurent, LaurentAmbient, LaurentFamily, LaurentSeries, MAX_PATH_DEGREE, RESIDUE_TOLERANCE};
