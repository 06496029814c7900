#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0)` also rejects NaN

pub mod command;
pub mod geometry;
pub mod identification;
pub mod mission;
pub mod planner;
pub mod reactive;
pub mod render;
mod scalar;
pub mod scenario;
pub mod sim;

pub use scalar::{wrap_angle, Scalar};
