//! Experiment layer on top of the `deposim` core: declarative JSON
//! configs, parallel replica execution, theorem-keyed validation suites
//! and plot-ready CSV emission.

pub mod calibration;
pub mod commands;
pub mod config;
pub mod manifest;
pub mod out;
pub mod runner;
pub mod suites;

/// Exit codes shared by the binary and the integration tests.
pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
