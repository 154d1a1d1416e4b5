//! Checks shared by the core test targets and the acceptance run.
#![allow(dead_code)]

pub mod distributions;
pub mod gradients;
pub mod identity;
pub mod pinch;
pub mod pretraining;
