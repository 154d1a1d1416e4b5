//! The fourteen stochastic perturbation modules.
//!
//! Every module comes as a pair: `sample_*` turns an [`RngStream`] and a
//! [`Complexity`] into an explicit parameter struct, and `apply_*` is a pure
//! function of the image and those parameters. Realized noise (per-pixel
//! offsets, chosen pixels, swap lists) lives in the parameters, so applying
//! the same parameters twice gives the same image.
//!
//! Modules that can be skipped carry an `applied` flag drawn first from the
//! stream; skipped parameters apply as the identity.
//!
//! [`RngStream`]: crate::rng::RngStream

mod banks;
mod geometric;
mod noise;

pub use banks::{Banks, BACKGROUND_COUNT, STROKE_COUNT};
pub use geometric::*;
pub use noise::*;

use crate::imgcore::KernelError;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("complexity must lie in [0, 1], got {0}")]
    Complexity(f64),
    #[error("invalid {module} parameters: {reason}")]
    InvalidParams {
        module: &'static str,
        reason: &'static str,
    },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

pub(crate) fn invalid(module: &'static str, reason: &'static str) -> TransformError {
    TransformError::InvalidParams { module, reason }
}

/// Global strength knob shared by all modules, in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default)]
pub struct Complexity(f64);

impl Complexity {
    pub const ZERO: Complexity = Complexity(0.0);
    pub const ONE: Complexity = Complexity(1.0);

    pub fn new(value: f64) -> Result<Self, TransformError> {
        if (0.0..=1.0).contains(&value) {
            Ok(Complexity(value))
        } else {
            Err(TransformError::Complexity(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Axis-aligned pixel rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl Rect {
    pub fn full() -> Self {
        Rect {
            x: 0,
            y: 0,
            w: crate::imgcore::SIZE,
            h: crate::imgcore::SIZE,
        }
    }

    pub fn fits_image(&self) -> bool {
        self.x + self.w <= crate::imgcore::SIZE && self.y + self.h <= crate::imgcore::SIZE
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x && y >= self.y && x < self.x + self.w && y < self.y + self.h
    }
}

/// Probability that each skippable module is *applied*.
pub mod apply_rate {
    pub const OCCLUSION: f64 = 0.40;
    pub const SMOOTHING: f64 = 0.25;
    pub const PERMUTE: f64 = 0.20;
    pub const GAUSSIAN_NOISE: f64 = 0.30;
    pub const SALT_PEPPER: f64 = 0.25;
    pub const SCRATCHES: f64 = 0.15;
}
