//! Fixture schema, seeded generators, check orchestration and report output.

pub mod fixture;
pub mod random;
pub mod selftest;
pub mod suite;

pub use fixture::{parse_fixture, read_fixture, FixtureDocument};
pub use selftest::{ops_selftest, spectral_bc, PairSpec};
pub use suite::{kp_residual_field, kp_residual_grid, run_suite, run_suite_with_threads, threads_from_env, Check, CheckConfig, PolicyOverrides, SuiteReport, THREADS_ENV};
