//! Simulation and statistical-validation toolkit for heavy-tailed
//! non-local deposition models on the d-dimensional torus (d = 1, 2).
//!
//! The library is organised around three layers:
//!
//! * a deterministic kernel ([`shape`], [`torus`], [`params`]) that knows how
//!   to evaluate a single deposited bump anywhere on the torus,
//! * the stochastic machinery ([`rng`], [`sampling`], [`deposition`]) that
//!   grows discretized profiles under the rand, min and stellar dynamics,
//! * evaluators and samplers for the limiting objects the dynamics converge
//!   to ([`limits`]) together with the estimators and goodness-of-fit tests
//!   used to compare simulation against them ([`stats`]).

pub mod deposition;
pub mod error;
pub mod limits;
pub mod mintree;
pub mod params;
pub mod quad;
pub mod rng;
pub mod sampling;
pub mod shape;
pub mod stats;
pub mod torus;

pub use error::Error;
pub use params::{ModelKind, ModelParams};
pub use rng::RngStream;
pub use shape::{ShapeFunction, ShapeKind};
pub use torus::TorusPoint;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
