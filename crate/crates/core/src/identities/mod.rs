//! Numerical certificates for theta-function identities.
//!
//! Every check returns a [`ResidualReport`] whose residual is normalized by
//! the largest term taking part in the identity.

mod elliptic;
mod fit;
mod kp;
mod report;
mod schottky;
mod secancy;
mod surface;
mod universal;
mod weil;

pub use elliptic::{elliptic_function_from_divisor, EllipticFunction, ELLIPTIC_TOLERANCE};
pub use fit::{fit_kp_parameters, FitOptions, KpFit};
pub(crate) use kp::hirota_terms;
pub use kp::{
    fit_hirota_constant, hirota_residual, hirota_value, hirota_residual_max, kummer_kp_residual, KpDirections, KummerKpReport, KummerKpVariant,
    KP_TOLERANCE,
};
pub use report::{fmt_c, relative, ResidualReport, NORMALIZER_FLOOR};
pub use schottky::{schottky_igusa, SchottkyReport, SCHOTTKY_TOLERANCE};
pub use secancy::{is_two_torsion, secancy_from_rows, secancy_residual, SecancyMode, SecancyQuery, SECANCY_TOLERANCE, TORSION_GUARD};
pub use surface::{local_scale, theta_surface_residual, SurfaceForm, SurfaceJet, SURFACE_TOLERANCE};
pub use universal::{addition_residual, quasiperiodicity_residual, UNIVERSAL_TOLERANCE};
pub use weil::{weil_residual, weil_terms, WeilReport, WEIL_ATTEMPTS, WEIL_TOLERANCE};
