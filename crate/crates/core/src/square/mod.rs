//! Cutting the unit square into convex regions, by lines through the center
//! or by chords between random perimeter points.

pub mod dump;
pub mod experiments;
pub mod lines;
pub mod region;

pub use dump::{cut_sample, write_dump, CutSample, Model};
pub use experiments::{
    center_line_experiment, chord_experiment, half_area_bounds, lambda_estimate, mc_chord_intersection,
    CenterLineReport, ChordReport, LambdaEstimate,
};
pub use lines::{sample_center_line, sample_chord, LineKind, Point, Side, SquareLine};
pub use region::{split_regions, ConvexRegion, RegionSet};
