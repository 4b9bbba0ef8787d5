//! Curve fixtures, Baker–Akhiezer checks, KP fields and divisor tracking.

mod ba;
mod field;
mod fixture;
mod flex;

pub use ba::{ba_consistency, ba_consistency_at, ba_potential, BaConsistency, BaWindow, BA_FIT_POINTS, BA_HELD_OUT, BA_STEP, BA_TOLERANCE};
pub use field::{
    kp_fd_residual, kp_field, Axis, FieldGrid, GridSpec, KP_FD_TOLERANCE, MASK_DISTANCE, MIN_AXIS_SAMPLES, RESOLUTION_FRACTION,
};
pub use fixture::{
    fit_galilean_shift, fixture_from_document, genus1_fixture, genus1_weierstrass, load_genus2_fixture, CoordinateJet,
    CurveFixture,
};
pub use flex::{flex_track, flex_w, FlexTrack, TrackPoint, FLEX_D_TOLERANCE, FLEX_NEWTON_STEPS, SIMPLE_ZERO_GUARD};
