//! 32×32 grey-level images and the numeric kernels the transforms are
//! built on: interpolation, Gaussian convolution and grey-scale morphology.

mod convolve;
mod morph;
mod raster;
mod sample;

use alloc::vec;
use alloc::vec::Vec;

pub use convolve::{convolve_field, convolve_gaussian, convolve_gaussian_normalized, gaussian_kernel_1d};
pub use morph::{morph, MorphMode, StructuringElement, ELEMENT_COUNT};
pub use raster::{rasterize_strokes, Point};
pub use sample::{bicubic_sample, bilinear_sample, rotate_bicubic};

/// Side length of every pipeline image.
pub const SIZE: usize = 32;
/// Number of pixels in an image.
pub const PIXELS: usize = SIZE * SIZE;
/// Geometric center of the pixel grid (pixel centers sit on integers).
pub const CENTER: f64 = (SIZE as f64 - 1.0) / 2.0;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("kernel size must be odd and at least 1, got {0}")]
    KernelSize(usize),
    #[error("variance must be positive and finite, got {0}")]
    Variance(f64),
}

/// Row-major 32×32 intensities in `[0, 1]`; 1 is ink.
#[derive(Clone, PartialEq)]
pub struct GreyImage {
    data: Vec<f32>,
}

impl core::fmt::Debug for GreyImage {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let ink = self.data.iter().filter(|&&v| v > 0.5).count();
        write!(f, "GreyImage {{ {SIZE}x{SIZE}, mean {:.4}, ink {ink} }}", self.mean())
    }
}

impl Default for GreyImage {
    fn default() -> Self {
        Self::zeros()
    }
}

impl GreyImage {
    pub fn zeros() -> Self {
        Self::filled(0.0)
    }

    pub fn filled(value: f32) -> Self {
        GreyImage {
            data: vec![value.clamp(0.0, 1.0); PIXELS],
        }
    }

    /// Builds an image from `f(x, y)`, clamping into `[0, 1]`.
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(PIXELS);
        for y in 0..SIZE {
            for x in 0..SIZE {
                data.push(clamp_unit(f(x, y)));
            }
        }
        GreyImage { data }
    }

    /// Takes ownership of row-major pixels. Returns `None` on a length
    /// mismatch; values are clamped (NaN becomes 0).
    pub fn from_pixels(mut data: Vec<f32>) -> Option<Self> {
        if data.len() != PIXELS {
            return None;
        }
        for v in &mut data {
            *v = clamp_unit(*v as f64);
        }
        Some(GreyImage { data })
    }

    /// Decodes 8-bit levels with `k -> k / 255`.
    pub fn from_u8(levels: &[u8]) -> Option<Self> {
        if levels.len() != PIXELS {
            return None;
        }
        Some(GreyImage {
            data: levels.iter().map(|&k| k as f32 / 255.0).collect(),
        })
    }

    /// Quantizes to 8-bit levels with `round(255 v)`.
    pub fn to_u8(&self) -> Vec<u8> {
        self.data.iter().map(|&v| quantize(v)).collect()
    }

    pub fn pixels(&self) -> &[f32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.data[y * SIZE + x]
    }

    /// Pixel at signed coordinates, `outside` when off the grid.
    #[inline]
    pub fn get_or(&self, x: i64, y: i64, outside: f32) -> f32 {
        if x < 0 || y < 0 || x >= SIZE as i64 || y >= SIZE as i64 {
            outside
        } else {
            self.data[y as usize * SIZE + x as usize]
        }
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f32) {
        self.data[y * SIZE + x] = clamp_unit(value as f64);
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().map(|&v| v as f64).sum::<f64>() / PIXELS as f64
    }

    /// Pixel values widened to `f64`, the input layout used by the models.
    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.data.iter().map(|&v| v as f64).collect()
    }

    /// Element-wise maximum with `other`.
    pub fn max_with(&self, other: &GreyImage) -> GreyImage {
        GreyImage {
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a.max(b)).collect(),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.data.len() == PIXELS && self.data.iter().all(|v| (0.0..=1.0).contains(v))
    }
}

#[inline]
pub(crate) fn clamp_unit(v: f64) -> f32 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0) as f32
    }
}

#[inline]
pub fn quantize(v: f32) -> u8 {
    crate::math::round(v.clamp(0.0, 1.0) as f64 * 255.0) as u8
}
