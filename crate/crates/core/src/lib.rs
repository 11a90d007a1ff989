//! Off-axis stereo cameras for ray tracers.
//!
//! A tracked eye in front of a fixed projection screen sees the scene
//! through an asymmetric frustum. This crate builds that frustum as
//! OpenGL-style matrices, converts it to a cropped symmetric pinhole camera
//! that ordinary ray tracing cameras can express, recovers the pinhole
//! camera from the matrices alone, and generates primary rays for all three
//! forms. A small CPU ray caster renders stereo pairs to PPM.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod geom;
pub mod offaxis;
pub mod raygen;
pub mod render;

pub use error::{Error, Result};
