//! One-pass error-bounded simplification of 2-D trajectories.

pub mod algorithm;
pub mod baselines;
pub mod compare;
pub mod datagen;
pub mod error;
pub mod fitting;
pub mod geometry;
pub mod io;
pub mod metrics;
pub mod onepass;
pub mod repr;

pub use algorithm::Algorithm;
pub use error::{Error, Result};
pub use fitting::{FitConfig, Optimizations};
pub use geometry::Point;
pub use onepass::{simplify, Mode, OperbEncoder};
pub use repr::{PiecewiseRepresentation, Segment};
