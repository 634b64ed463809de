//! Spatial deformation puzzles with exact answers.
//!
//! The [`shape`] and [`cube`] engines define every operation
//! deterministically, [`codec`] gives each object one canonical text form,
//! [`taskgen`] turns random draws into multiple-choice questions,
//! [`render`] draws them as SVG, and [`ladder`] scores an answering agent by
//! how many deformation steps it can follow.

pub mod codec;
pub mod cube;
pub mod ladder;
pub mod render;
pub mod rng;
pub mod shape;
pub mod taskgen;
