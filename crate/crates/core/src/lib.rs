//! Numerical laboratory for Riemann theta functions, Kummer/KP identities,
//! Baker–Akhiezer functions and (pseudo-)differential operator calculus.
//!
//! Modules:
//! - [`theta`]: theta functions with characteristics, second-order thetas, Kummer map.
//! - [`identities`]: residual checks for the theta identities and the Hirota/KP system.
//! - [`diffop`]: truncated series and operator algebra.
//! - [`spectral`]: Burchnall–Chaundy polynomials of commuting pairs.
//! - [`bakp`]: curve fixtures, Baker–Akhiezer consistency, KP fields, theta-divisor tracking.
//! - [`cliio`]: fixture schema, random generation, check orchestration and report output.

pub mod bakp;
pub mod cliio;
pub mod diffop;
pub mod error;
pub mod identities;
pub mod linalg;
pub mod spectral;
pub mod theta;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
