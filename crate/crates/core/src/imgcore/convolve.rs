use alloc::vec;
use alloc::vec::Vec;

use super::{clamp_unit, GreyImage, KernelError, PIXELS, SIZE};
use crate::math;

/// Normalized 1-D Gaussian taps `exp(-i²/(2·variance))` for
/// `i ∈ [-size/2, size/2]`.
pub fn gaussian_kernel_1d(size: usize, variance: f64) -> Result<Vec<f64>, KernelError> {
    if size == 0 || size % 2 == 0 {
        return Err(KernelError::KernelSize(size));
    }
    if !(variance > 0.0) || !variance.is_finite() {
        return Err(KernelError::Variance(variance));
    }
    let half = (size / 2) as i64;
    let mut k: Vec<f64> = (-half..=half)
        .map(|i| math::exp(-((i * i) as f64) / (2.0 * variance)))
        .collect();
    let z: f64 = k.iter().sum();
    for v in &mut k {
        *v /= z;
    }
    Ok(k)
}

/// Separable convolution of a 32×32 real field with a symmetric odd
/// 1-D kernel; samples off the grid are zero.
pub fn convolve_field(field: &[f64], kernel: &[f64]) -> Vec<f64> {
    assert_eq!(field.len(), PIXELS);
    assert!(kernel.len() % 2 == 1);
    let half = kernel.len() / 2;
    let tmp = blur_rows(field, kernel, half);
    // the vertical pass is the horizontal one applied to the transpose
    transpose(&blur_rows(&transpose(&tmp), kernel, half))
}

fn transpose(f: &[f64]) -> Vec<f64> {
    let mut t = vec![0.0; PIXELS];
    for y in 0..SIZE {
        for x in 0..SIZE {
            t[x * SIZE + y] = f[y * SIZE + x];
        }
    }
    t
}

/// 1-D convolution of every row. Rows are copied into a zero-padded
/// buffer so the tap loop needs no bounds tests, and mirrored taps share
/// one multiply.
fn blur_rows(field: &[f64], kernel: &[f64], half: usize) -> Vec<f64> {
    let width = SIZE + 2 * half;
    let mut pad = vec![0.0; width];
    let mut out = vec![0.0; PIXELS];
    for (row, orow) in field.chunks_exact(SIZE).zip(out.chunks_exact_mut(SIZE)) {
        pad[half..half + SIZE].copy_from_slice(row);
        for (o, v) in orow.iter_mut().zip(&pad[half..]) {
            *o = kernel[half] * v;
        }
        for d in 1..=half.min(SIZE + half - 1) {
            let w = kernel[half + d];
            let (left, right) = (&pad[half - d..half - d + SIZE], &pad[half + d..half + d + SIZE]);
            for ((o, l), r) in orow.iter_mut().zip(left).zip(right) {
                *o += w * (l + r);
            }
        }
    }
    out
}

/// Isotropic Gaussian blur with zero padding. The kernel sums to 1.
pub fn convolve_gaussian(
    img: &GreyImage,
    kernel_size: usize,
    variance: f64,
) -> Result<GreyImage, KernelError> {
    let k = gaussian_kernel_1d(kernel_size, variance)?;
    let out = convolve_field(&img.to_f64_vec(), &k);
    Ok(GreyImage {
        data: out.into_iter().map(clamp_unit).collect(),
    })
}

/// Gaussian blur that renormalizes by the kernel weight falling inside the
/// grid, so constant images stay constant up to rounding. Values are not
/// clamped.
pub fn convolve_gaussian_normalized(
    img: &GreyImage,
    kernel_size: usize,
    variance: f64,
) -> Result<Vec<f64>, KernelError> {
    let k = gaussian_kernel_1d(kernel_size, variance)?;
    let num = convolve_field(&img.to_f64_vec(), &k);
    let den = convolve_field(&[1.0; PIXELS], &k);
    Ok(num.iter().zip(&den).map(|(n, d)| n / d).collect())
}
