//! Root finding, quadrature, and streaming statistics.

pub mod montecarlo;
pub mod quadrature;
pub mod roots;
pub mod stats;

pub use montecarlo::{Experiment, Tally};
pub use quadrature::{integrate, integrate_with_breaks, Quadrature};
pub use roots::find_root;
pub use stats::{Estimate, StreamingStats};
