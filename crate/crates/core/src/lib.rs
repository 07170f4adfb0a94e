pub mod detect;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod group;
pub mod hierarchy;
pub mod overlay;
pub mod pipeline;
pub mod raster;
pub mod synth;
