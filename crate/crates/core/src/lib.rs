//! Random partitions of a unit stick and of the unit square: exact values,
//! numerical evaluation, and reproducible Monte Carlo estimates.
//!
//! All sampling is indexed. Sample `i` of a run draws from its own stream
//! derived from the run seed and `i`, so results do not depend on how samples
//! are scheduled across threads.

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod kgon;
pub mod numerics;
pub mod polygon;
pub mod runner;
pub mod sampling;
pub mod square;
pub mod stick;

pub use error::{Error, Result};
pub use numerics::{Estimate, Experiment, StreamingStats};
pub use sampling::{Pieces, RandomStream, Seed};
