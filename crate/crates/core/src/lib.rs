//! Comparison-oracle zeroth-order optimization on ridge objectives.
//!
//! The numeric core (`geometry`, `objectives`, `oracles`, `algorithms`) is
//! generic over the float type through [`Real`]; the aliases below pin the
//! common `f64` and `f32` instantiations. Diagnostics and the experiment
//! harness work in `f64`.

pub mod error;
pub mod algorithms;
pub mod diagnostics;
pub mod geometry;
pub mod harness;
pub mod objectives;
pub mod oracles;
pub mod scalar;

pub use error::{Error, Result};
pub use geometry::RngStream;
pub use scalar::Real;

pub type Vec64 = Vec<f64>;
pub type Subspace64 = geometry::Subspace<f64>;
pub type Subspace32 = geometry::Subspace<f32>;
pub type RidgeObjective64 = objectives::RidgeObjective<f64>;
pub type RidgeObjective32 = objectives::RidgeObjective<f32>;
