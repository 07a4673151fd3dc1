//! Exact zero-dimensional resolutions of cubes by towers of regular-open tilings.

pub mod arrangement;
pub mod error;
pub mod geometry;
pub mod oracle;
pub mod pipeline;
pub mod rational;
pub mod regular;
pub mod report;
pub mod resolution;
pub mod stone;
pub mod sweep;
pub mod tiling;
pub mod tower;

pub use arrangement::{build_arrangement, face_in_closure, Arrangement, AxisTag, BoxArrangement, Face, FaceSet};
pub use error::{Error, Result};
pub use geometry::{diameter, OpenBox};
pub use rational::Rational;
pub use regular::{frontier, regularize, ro_complement, ro_equal, ro_join, ro_meet, RegularOpenSet};
