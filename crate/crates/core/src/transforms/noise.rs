//! Noise-injecting modules: motion blur through grey-level contrast.

use alloc::vec::Vec;

use super::{apply_rate, invalid, Banks, Complexity, Rect, TransformError};
use crate::imgcore::{
    clamp_unit, convolve_gaussian_normalized, morph, rotate_bicubic, GreyImage, MorphMode,
    StructuringElement, CENTER, PIXELS, SIZE,
};
use crate::math;
use crate::rng::RngStream;

// -------------------------------------------------------------- motion blur

#[derive(Clone, Debug, PartialEq)]
pub struct MotionBlurParams {
    /// Degrees, counter-clockwise on screen from +x.
    pub angle: f64,
    /// Pixels; below 1 the module does nothing.
    pub length: f64,
}

/// Draws: angle (1), length (2).
pub fn sample_motion_blur(rng: &mut RngStream, complexity: Complexity) -> MotionBlurParams {
    let angle = rng.uniform(0.0, 360.0);
    let length = math::abs(rng.normal(0.0, 3.0 * complexity.value()));
    MotionBlurParams { angle, length }
}

impl MotionBlurParams {
    pub fn conforms(&self, _complexity: Complexity) -> bool {
        (0.0..360.0).contains(&self.angle) && self.length >= 0.0
    }
}

/// Mean of `ceil(length) + 1` nearest-neighbour samples taken at unit steps
/// along the angle, starting at the pixel itself. Off-grid samples are 0.
pub fn apply_motion_blur(img: &GreyImage, p: &MotionBlurParams) -> Result<GreyImage, TransformError> {
    if !p.angle.is_finite() || !p.length.is_finite() || p.length < 0.0 {
        return Err(invalid("motion blur", "angle and length must be finite, length non-negative"));
    }
    if p.length < 1.0 {
        return Ok(img.clone());
    }
    let steps = math::ceil(p.length) as usize;
    let theta = p.angle.to_radians();
    let (ux, uy) = (math::cos(theta), -math::sin(theta));
    let offsets: Vec<(i64, i64)> = (0..=steps)
        .map(|k| (math::round(k as f64 * ux) as i64, math::round(k as f64 * uy) as i64))
        .collect();
    let n = offsets.len() as f64;
    Ok(GreyImage::from_fn(|x, y| {
        let sum: f64 = offsets
            .iter()
            .map(|&(dx, dy)| img.get_or(x as i64 + dx, y as i64 + dy, 0.0) as f64)
            .sum();
        sum / n
    }))
}

// ---------------------------------------------------------------- occlusion

/// Standard deviation (pixels) of the occluding patch's destination center.
pub const OCCLUSION_POSITION_STD: f64 = 5.0;

#[derive(Clone, Debug, PartialEq)]
pub struct OcclusionParams {
    pub applied: bool,
    pub occluder: GreyImage,
    pub src: Rect,
    pub dst: (i64, i64),
}

impl OcclusionParams {
    pub fn skipped() -> Self {
        OcclusionParams {
            applied: false,
            occluder: GreyImage::zeros(),
            src: Rect::default(),
            dst: (0, 0),
        }
    }

    pub fn max_side(complexity: Complexity) -> usize {
        2 + math::round(14.0 * complexity.value()) as usize
    }

    pub fn conforms(&self, complexity: Complexity) -> bool {
        if !self.applied {
            return true;
        }
        let top = Self::max_side(complexity);
        self.src.fits_image()
            && (2..=top).contains(&self.src.w)
            && (2..=top).contains(&self.src.h)
            && self.dst.0 >= 0
            && self.dst.1 >= 0
            && self.dst.0 as usize + self.src.w <= SIZE
            && self.dst.1 as usize + self.src.h <= SIZE
    }
}

fn clamp_origin(center: f64, side: usize) -> i64 {
    let origin = math::round(center - (side as f64 - 1.0) / 2.0) as i64;
    origin.clamp(0, (SIZE - side) as i64)
}

/// Draws: applied (1); when applied, width and height (uniform integers in
/// `[2, 2 + round(14·complexity)]`), source corner, destination center
/// (normal around the image center), then whatever `occluder` consumes.
pub fn sample_occlusion(
    rng: &mut RngStream,
    complexity: Complexity,
    occluder: impl FnOnce(&mut RngStream) -> GreyImage,
) -> OcclusionParams {
    if !rng.bernoulli(apply_rate::OCCLUSION) {
        return OcclusionParams::skipped();
    }
    let top = OcclusionParams::max_side(complexity) as i64;
    let w = rng.int_inclusive(2, top) as usize;
    let h = rng.int_inclusive(2, top) as usize;
    let sx = rng.int_inclusive(0, (SIZE - w) as i64) as usize;
    let sy = rng.int_inclusive(0, (SIZE - h) as i64) as usize;
    let cx = rng.normal(CENTER, OCCLUSION_POSITION_STD);
    let cy = rng.normal(CENTER, OCCLUSION_POSITION_STD);
    let dst = (clamp_origin(cx, w), clamp_origin(cy, h));
    OcclusionParams {
        applied: true,
        occluder: occluder(rng),
        src: Rect { x: sx, y: sy, w, h },
        dst,
    }
}

/// Pastes the source rectangle of the occluder at `dst`, keeping the
/// lighter pixel. Parts falling off the image are dropped.
pub fn apply_occlusion(img: &GreyImage, p: &OcclusionParams) -> Result<GreyImage, TransformError> {
    if !p.applied {
        return Ok(img.clone());
    }
    if !p.src.fits_image() {
        return Err(invalid("occlusion", "source rectangle exceeds the occluder"));
    }
    let mut out = img.clone();
    for j in 0..p.src.h {
        for i in 0..p.src.w {
            let (tx, ty) = (p.dst.0 + i as i64, p.dst.1 + j as i64);
            if tx < 0 || ty < 0 || tx >= SIZE as i64 || ty >= SIZE as i64 {
                continue;
            }
            let (tx, ty) = (tx as usize, ty as usize);
            let v = p.occluder.get(p.src.x + i, p.src.y + j);
            out.set(tx, ty, out.get(tx, ty).max(v));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------- smoothing

#[derive(Clone, Debug, PartialEq)]
pub struct SmoothingParams {
    pub applied: bool,
    pub kernel_size: usize,
    pub variance: f64,
    pub centers: Vec<(usize, usize)>,
}

impl SmoothingParams {
    pub fn skipped() -> Self {
        SmoothingParams {
            applied: false,
            kernel_size: 1,
            variance: 1.0,
            centers: Vec::new(),
        }
    }

    pub fn max_centers(complexity: Complexity) -> usize {
        3 + math::floor(10.0 * complexity.value()) as usize
    }

    pub fn conforms(&self, complexity: Complexity) -> bool {
        if !self.applied {
            return true;
        }
        let k = complexity.value();
        let ks_top = math::ceil(12.0 + 20.0 * k) as usize + 1;
        self.kernel_size % 2 == 1
            && (13..=ks_top).contains(&self.kernel_size)
            && (2.0..=2.0 + 6.0 * k).contains(&self.variance)
            && (3..=Self::max_centers(complexity)).contains(&self.centers.len())
            && self.centers.iter().all(|&(x, y)| x < SIZE && y < SIZE)
    }
}

/// Smallest odd integer not below `raw`.
pub fn round_up_to_odd(raw: f64) -> usize {
    let k = math::ceil(raw) as usize;
    if k % 2 == 0 { k + 1 } else { k }
}

/// Draws: applied (1); when applied, raw kernel size, variance, center
/// count, then an `(x, y)` pair per center.
pub fn sample_smoothing(rng: &mut RngStream, complexity: Complexity) -> SmoothingParams {
    if !rng.bernoulli(apply_rate::SMOOTHING) {
        return SmoothingParams::skipped();
    }
    let k = complexity.value();
    let kernel_size = round_up_to_odd(rng.uniform(12.0, 12.0 + 20.0 * k));
    let variance = rng.uniform(2.0, 2.0 + 6.0 * k);
    let count = rng.int_inclusive(3, SmoothingParams::max_centers(complexity) as i64) as usize;
    let centers = (0..count)
        .map(|_| {
            let x = rng.index(SIZE);
            let y = rng.index(SIZE);
            (x, y)
        })
        .collect();
    SmoothingParams {
        applied: true,
        kernel_size,
        variance,
        centers,
    }
}

/// Sum of cone windows (1 at the center, 0 at half the kernel size) placed
/// at each center.
pub fn smoothing_mask(kernel_size: usize, centers: &[(usize, usize)]) -> Vec<f64> {
    let mut mask = alloc::vec![0.0; PIXELS];
    let half = (kernel_size / 2) as i64;
    let reach = kernel_size as f64 / 2.0;
    for &(cx, cy) in centers {
        for dy in -half..=half {
            for dx in -half..=half {
                let (x, y) = (cx as i64 + dx, cy as i64 + dy);
                if x < 0 || y < 0 || x >= SIZE as i64 || y >= SIZE as i64 {
                    continue;
                }
                let w = 1.0 - math::hypot(dx as f64, dy as f64) / reach;
                if w > 0.0 {
                    mask[y as usize * SIZE + x as usize] += w;
                }
            }
        }
    }
    mask
}

/// `(image + filtered · mask) / (mask + 1)` where `filtered` is the blurred
/// image stretched to `[0, 1]` (left alone when it is flat).
pub fn apply_smoothing(img: &GreyImage, p: &SmoothingParams) -> Result<GreyImage, TransformError> {
    if !p.applied {
        return Ok(img.clone());
    }
    if p.centers.iter().any(|&(x, y)| x >= SIZE || y >= SIZE) {
        return Err(invalid("smoothing", "averaging center outside the image"));
    }
    let mut filtered = convolve_gaussian_normalized(img, p.kernel_size, p.variance)?;
    let lo = filtered.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = filtered.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo > 1e-9 {
        for v in &mut filtered {
            *v = (*v - lo) / (hi - lo);
        }
    }
    let mask = smoothing_mask(p.kernel_size, &p.centers);
    let px = img.pixels();
    let data = (0..PIXELS)
        .map(|i| clamp_unit((px[i] as f64 + filtered[i] * mask[i]) / (mask[i] + 1.0)))
        .collect();
    Ok(GreyImage::from_pixels(data).expect("1024 pixels"))
}

// ------------------------------------------------------------------ permute

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Neighbor {
    Left,
    Right,
    Up,
    Down,
}

impl Neighbor {
    const ALL: [Neighbor; 4] = [Neighbor::Left, Neighbor::Right, Neighbor::Up, Neighbor::Down];

    fn offset(self) -> (i64, i64) {
        match self {
            Neighbor::Left => (-1, 0),
            Neighbor::Right => (1, 0),
            Neighbor::Up => (0, -1),
            Neighbor::Down => (0, 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PermuteParams {
    pub applied: bool,
    /// `(pixel index, neighbour)` pairs, executed in order.
    pub swaps: Vec<(usize, Neighbor)>,
}

impl PermuteParams {
    pub fn skipped() -> Self {
        PermuteParams { applied: false, swaps: Vec::new() }
    }

    pub fn count_for(complexity: Complexity) -> usize {
        math::round(complexity.value() / 3.0 * PIXELS as f64) as usize
    }

    pub fn conforms(&self, complexity: Complexity) -> bool {
        if !self.applied {
            return true;
        }
        let mut idx: Vec<usize> = self.swaps.iter().map(|s| s.0).collect();
        idx.sort_unstable();
        idx.dedup();
        idx.len() == self.swaps.len()
            && self.swaps.len() == Self::count_for(complexity)
            && idx.iter().all(|&i| i < PIXELS)
    }
}

/// Draws: applied (1); when applied, the distinct pixel indices, then one
/// neighbour per pixel.
pub fn sample_permute(rng: &mut RngStream, complexity: Complexity) -> PermuteParams {
    if !rng.bernoulli(apply_rate::PERMUTE) {
        return PermuteParams::skipped();
    }
    let selected = rng.choose_distinct(PIXELS, PermuteParams::count_for(complexity));
    let swaps = selected
        .into_iter()
        .map(|i| (i, Neighbor::ALL[rng.index(4)]))
        .collect();
    PermuteParams { applied: true, swaps }
}

/// Swaps each listed pixel with its neighbour in order; swaps that would
/// leave the grid are skipped.
pub fn apply_permute(img: &GreyImage, p: &PermuteParams) -> Result<GreyImage, TransformError> {
    if !p.applied {
        return Ok(img.clone());
    }
    if p.swaps.iter().any(|s| s.0 >= PIXELS) {
        return Err(invalid("permute", "pixel index out of range"));
    }
    let mut data: Vec<f32> = img.pixels().to_vec();
    for &(i, nb) in &p.swaps {
        let (x, y) = ((i % SIZE) as i64, (i / SIZE) as i64);
        let (dx, dy) = nb.offset();
        let (nx, ny) = (x + dx, y + dy);
        if nx < 0 || ny < 0 || nx >= SIZE as i64 || ny >= SIZE as i64 {
            continue;
        }
        data.swap(i, ny as usize * SIZE + nx as usize);
    }
    Ok(GreyImage::from_pixels(data).expect("1024 pixels"))
}

// ----------------------------------------------------------- gaussian noise

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianNoiseParams {
    pub applied: bool,
    pub sigma: f64,
    /// Realized per-pixel offsets; empty when skipped.
    pub noise: Vec<f64>,
}

impl GaussianNoiseParams {
    pub fn conforms(&self, complexity: Complexity) -> bool {
        (self.sigma - complexity.value() / 10.0).abs() < 1e-15
            && (!self.applied || self.noise.len() == PIXELS)
    }
}

/// Draws: applied (1); when applied, 1024 normals (2 draws each).
pub fn sample_gaussian_noise(rng: &mut RngStream, complexity: Complexity) -> GaussianNoiseParams {
    let sigma = complexity.value() / 10.0;
    if !rng.bernoulli(apply_rate::GAUSSIAN_NOISE) {
        return GaussianNoiseParams { applied: false, sigma, noise: Vec::new() };
    }
    let noise = (0..PIXELS).map(|_| rng.normal(0.0, sigma)).collect();
    GaussianNoiseParams { applied: true, sigma, noise }
}

pub fn apply_gaussian_noise(img: &GreyImage, p: &GaussianNoiseParams) -> Result<GreyImage, TransformError> {
    if !p.applied {
        return Ok(img.clone());
    }
    if p.noise.len() != PIXELS || p.noise.iter().any(|v| !v.is_finite()) {
        return Err(invalid("gaussian noise", "needs 1024 finite offsets"));
    }
    let data = img
        .pixels()
        .iter()
        .zip(&p.noise)
        .map(|(&v, &n)| clamp_unit(v as f64 + n))
        .collect();
    Ok(GreyImage::from_pixels(data).expect("1024 pixels"))
}

// --------------------------------------------------------------- background

#[derive(Clone, Debug, PartialEq)]
pub struct BackgroundParams {
    pub background: GreyImage,
    pub strength: f64,
}

/// Upper bound on the background strength at `complexity`.
pub fn background_max_strength(complexity: Complexity) -> f64 {
    0.8 * complexity.value()
}

impl BackgroundParams {
    pub fn conforms(&self, complexity: Complexity) -> bool {
        let top = background_max_strength(complexity);
        (0.5 * top..=top).contains(&self.strength)
    }
}

/// Draws: texture index, horizontal and vertical wrap-around offsets,
/// strength factor on `[0.5, 1)`.
pub fn sample_background(rng: &mut RngStream, complexity: Complexity, banks: &Banks) -> BackgroundParams {
    let texture = &banks.backgrounds()[rng.index(banks.backgrounds().len())];
    let ox = rng.index(SIZE);
    let oy = rng.index(SIZE);
    let strength = background_max_strength(complexity) * rng.uniform(0.5, 1.0);
    let background = GreyImage::from_fn(|x, y| texture.get((x + ox) % SIZE, (y + oy) % SIZE) as f64);
    BackgroundParams { background, strength }
}

/// Per-pixel `max(image, strength · background)`.
pub fn apply_background(img: &GreyImage, p: &BackgroundParams) -> Result<GreyImage, TransformError> {
    if !(0.0..=1.0).contains(&p.strength) {
        return Err(invalid("background", "strength must lie in [0, 1]"));
    }
    Ok(GreyImage::from_fn(|x, y| {
        (img.get(x, y) as f64).max(p.background.get(x, y) as f64 * p.strength)
    }))
}

// ----------------------------------------------------------- salt & pepper

#[derive(Clone, Debug, PartialEq)]
pub struct SaltPepperParams {
    pub applied: bool,
    pub fraction: f64,
    /// `(pixel index, new value)`; empty when skipped.
    pub pixels: Vec<(usize, f32)>,
}

impl SaltPepperParams {
    pub fn count_for(fraction: f64) -> usize {
        math::round(fraction * PIXELS as f64) as usize
    }

    pub fn conforms(&self, complexity: Complexity) -> bool {
        let fraction_ok = (self.fraction - 0.2 * complexity.value()).abs() < 1e-15;
        if !self.applied {
            return fraction_ok;
        }
        let mut idx: Vec<usize> = self.pixels.iter().map(|p| p.0).collect();
        idx.sort_unstable();
        idx.dedup();
        fraction_ok
            && idx.len() == self.pixels.len()
            && self.pixels.len() == Self::count_for(self.fraction)
            && self.pixels.iter().all(|&(i, v)| i < PIXELS && (0.0..=1.0).contains(&v))
    }
}

/// Draws: applied (1); when applied, distinct pixel indices, then a
/// uniform value per pixel.
pub fn sample_salt_pepper(rng: &mut RngStream, complexity: Complexity) -> SaltPepperParams {
    let fraction = 0.2 * complexity.value();
    if !rng.bernoulli(apply_rate::SALT_PEPPER) {
        return SaltPepperParams { applied: false, fraction, pixels: Vec::new() };
    }
    let chosen = rng.choose_distinct(PIXELS, SaltPepperParams::count_for(fraction));
    let pixels = chosen.into_iter().map(|i| (i, rng.unit() as f32)).collect();
    SaltPepperParams { applied: true, fraction, pixels }
}

pub fn apply_salt_pepper(img: &GreyImage, p: &SaltPepperParams) -> Result<GreyImage, TransformError> {
    if !p.applied {
        return Ok(img.clone());
    }
    let mut data = img.pixels().to_vec();
    for &(i, v) in &p.pixels {
        if i >= PIXELS || !(0.0..=1.0).contains(&v) {
            return Err(invalid("salt and pepper", "pixel index or value out of range"));
        }
        data[i] = v;
    }
    Ok(GreyImage::from_pixels(data).expect("1024 pixels"))
}

// ---------------------------------------------------------------- scratches

/// Erosion passes applied to every scratch patch.
pub const SCRATCH_EROSIONS: usize = 2;
/// Smallest side of a random scratch crop.
pub const SCRATCH_MIN_CROP: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct ScratchPatch {
    pub stroke: GreyImage,
    /// Degrees.
    pub rotation: f64,
    pub crop: Rect,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScratchParams {
    pub applied: bool,
    pub patches: Vec<ScratchPatch>,
}

impl ScratchParams {
    pub fn skipped() -> Self {
        ScratchParams { applied: false, patches: Vec::new() }
    }

    pub fn conforms(&self, _complexity: Complexity) -> bool {
        !self.applied
            || ((1..=3).contains(&self.patches.len())
                && self.patches.iter().all(|p| {
                    p.crop.fits_image() && p.crop.w >= SCRATCH_MIN_CROP && p.crop.h >= SCRATCH_MIN_CROP
                }))
    }
}

/// Draws: applied (1); when applied, the patch count (1 uniform: 50/30/20 %
/// for 1/2/3), then per patch a stroke index, rotation (normal, std
/// `100·complexity` degrees) and crop rectangle.
pub fn sample_scratches(rng: &mut RngStream, complexity: Complexity, banks: &Banks) -> ScratchParams {
    if !rng.bernoulli(apply_rate::SCRATCHES) {
        return ScratchParams::skipped();
    }
    let u = rng.unit();
    let count = if u < 0.5 { 1 } else if u < 0.8 { 2 } else { 3 };
    let patches = (0..count)
        .map(|_| {
            let stroke = banks.strokes()[rng.index(banks.strokes().len())].clone();
            let rotation = rng.normal(0.0, 100.0 * complexity.value());
            let w = rng.int_inclusive(SCRATCH_MIN_CROP as i64, SIZE as i64) as usize;
            let h = rng.int_inclusive(SCRATCH_MIN_CROP as i64, SIZE as i64) as usize;
            let x = rng.int_inclusive(0, (SIZE - w) as i64) as usize;
            let y = rng.int_inclusive(0, (SIZE - h) as i64) as usize;
            ScratchPatch { stroke, rotation, crop: Rect { x, y, w, h } }
        })
        .collect();
    ScratchParams { applied: true, patches }
}

/// The white patch a scratch contributes: rotated stroke, cropped, eroded.
pub fn scratch_patch_image(patch: &ScratchPatch) -> GreyImage {
    let rotated = rotate_bicubic(&patch.stroke, patch.rotation);
    let mut layer = GreyImage::from_fn(|x, y| {
        if patch.crop.contains(x, y) { rotated.get(x, y) as f64 } else { 0.0 }
    });
    let plus = StructuringElement::ladder(2).expect("rank 2 exists");
    for _ in 0..SCRATCH_EROSIONS {
        layer = morph(&layer, &plus, MorphMode::Erode);
    }
    layer
}

pub fn apply_scratches(img: &GreyImage, p: &ScratchParams) -> Result<GreyImage, TransformError> {
    if !p.applied {
        return Ok(img.clone());
    }
    let mut out = img.clone();
    for patch in &p.patches {
        if !patch.crop.fits_image() || !patch.rotation.is_finite() {
            return Err(invalid("scratches", "crop outside the image or non-finite rotation"));
        }
        out = out.max_with(&scratch_patch_image(patch));
    }
    Ok(out)
}

// ----------------------------------------------------------------- contrast

#[derive(Clone, Debug, PartialEq)]
pub struct ContrastParams {
    pub contrast: f64,
    pub invert: bool,
}

/// Draws: contrast (1), invert (1).
pub fn sample_contrast(rng: &mut RngStream, complexity: Complexity) -> ContrastParams {
    let contrast = rng.uniform(1.0 - 0.85 * complexity.value(), 1.0);
    let invert = rng.bernoulli(0.5);
    ContrastParams { contrast, invert }
}

impl ContrastParams {
    pub fn conforms(&self, complexity: Complexity) -> bool {
        (1.0 - 0.85 * complexity.value()..=1.0).contains(&self.contrast)
    }
}

/// Maps `[0, 1]` onto `[(1-C)/2, 1-(1-C)/2]`, then optionally flips polarity.
pub fn apply_contrast(img: &GreyImage, p: &ContrastParams) -> Result<GreyImage, TransformError> {
    if !(0.0..=1.0).contains(&p.contrast) {
        return Err(invalid("contrast", "contrast must lie in [0, 1]"));
    }
    let lo = (1.0 - p.contrast) / 2.0;
    Ok(GreyImage::from_fn(|x, y| {
        let v = lo + p.contrast * img.get(x, y) as f64;
        if p.invert { 1.0 - v } else { v }
    }))
}
