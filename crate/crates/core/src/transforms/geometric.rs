//! Shape-changing modules: thickness, slant, affine, elastic, pinch.

use alloc::vec::Vec;
use core::f64::consts::PI;

use super::{invalid, Complexity, TransformError};
use crate::imgcore::{
    bilinear_sample, convolve_field, gaussian_kernel_1d, morph, GreyImage, MorphMode,
    StructuringElement, CENTER, ELEMENT_COUNT, PIXELS, SIZE,
};
use crate::math;
use crate::rng::RngStream;

// ---------------------------------------------------------------- thickness

/// Ladder size considered when dilating (`m` in `round(m·complexity)`).
pub const DILATION_LADDER: f64 = 10.0;
/// Ladder size considered when eroding; smaller so thin glyphs survive.
pub const EROSION_LADDER: f64 = 6.0;

#[derive(Clone, Debug, PartialEq)]
pub struct ThicknessParams {
    pub mode: MorphMode,
    pub elem_rank: usize,
}

/// Highest admissible ladder rank for `mode` at `complexity`.
pub fn thickness_max_rank(mode: MorphMode, complexity: Complexity) -> usize {
    let m = match mode {
        MorphMode::Dilate => DILATION_LADDER,
        MorphMode::Erode => EROSION_LADDER,
    };
    (math::round(m * complexity.value()) as usize).min(ELEMENT_COUNT - 1)
}

/// Draws: mode (1), rank (1+).
pub fn sample_thickness(rng: &mut RngStream, complexity: Complexity) -> ThicknessParams {
    let mode = if rng.bernoulli(0.5) { MorphMode::Dilate } else { MorphMode::Erode };
    let top = thickness_max_rank(mode, complexity);
    let elem_rank = rng.int_inclusive(0, top as i64) as usize;
    ThicknessParams { mode, elem_rank }
}

impl ThicknessParams {
    pub fn conforms(&self, complexity: Complexity) -> bool {
        self.elem_rank <= thickness_max_rank(self.mode, complexity)
    }
}

pub fn apply_thickness(img: &GreyImage, p: &ThicknessParams) -> Result<GreyImage, TransformError> {
    let elem = StructuringElement::ladder(p.elem_rank)
        .ok_or_else(|| invalid("thickness", "element rank above 9"))?;
    Ok(morph(img, &elem, p.mode))
}

// -------------------------------------------------------------------- slant

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SlantParams {
    pub slant: f64,
    pub direction: Direction,
}

/// Draws: slant (1), direction (1).
pub fn sample_slant(rng: &mut RngStream, complexity: Complexity) -> SlantParams {
    let k = complexity.value();
    let slant = rng.uniform(-k, k);
    let direction = if rng.bernoulli(0.5) { Direction::Right } else { Direction::Left };
    SlantParams { slant, direction }
}

impl SlantParams {
    pub fn conforms(&self, complexity: Complexity) -> bool {
        self.slant.abs() <= complexity.value()
    }

    /// Signed horizontal shift for row `y`; positive moves ink right.
    pub fn row_shift(&self, y: usize) -> i64 {
        // height above the vertical center
        let height = CENTER - y as f64;
        let shift = math::round(self.slant * height) as i64;
        match self.direction {
            Direction::Right => shift,
            Direction::Left => -shift,
        }
    }
}

pub fn apply_slant(img: &GreyImage, p: &SlantParams) -> Result<GreyImage, TransformError> {
    if !p.slant.is_finite() {
        return Err(invalid("slant", "non-finite slant"));
    }
    let shifts: Vec<i64> = (0..SIZE).map(|y| p.row_shift(y)).collect();
    Ok(GreyImage::from_fn(|x, y| img.get_or(x as i64 - shifts[y], y as i64, 0.0) as f64))
}

// ------------------------------------------------------------------- affine

/// Output `(x, y)`, in coordinates centered on the image, reads the input
/// pixel nearest to `(a·x + b·y + c, d·x + e·y + f)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl AffineParams {
    pub const IDENTITY: AffineParams = AffineParams { a: 1.0, b: 0.0, c: 0.0, d: 0.0, e: 1.0, f: 0.0 };

    pub fn conforms(&self, complexity: Complexity) -> bool {
        let k = complexity.value();
        let scale = |v: f64| (1.0 - 3.0 * k..=1.0 + 3.0 * k).contains(&v);
        let shear = |v: f64| (-3.0 * k..=3.0 * k).contains(&v);
        let shift = |v: f64| (-4.0 * k..=4.0 * k).contains(&v);
        scale(self.a) && scale(self.e) && shear(self.b) && shear(self.d) && shift(self.c) && shift(self.f)
    }
}

/// Draws six uniforms in the order a, b, c, d, e, f. The diagonal terms
/// (a, e) carry the scale range, the off-diagonal ones (b, d) the shear
/// range.
pub fn sample_affine(rng: &mut RngStream, complexity: Complexity) -> AffineParams {
    let k = complexity.value();
    let a = rng.uniform(1.0 - 3.0 * k, 1.0 + 3.0 * k);
    let b = rng.uniform(-3.0 * k, 3.0 * k);
    let c = rng.uniform(-4.0 * k, 4.0 * k);
    let d = rng.uniform(-3.0 * k, 3.0 * k);
    let e = rng.uniform(1.0 - 3.0 * k, 1.0 + 3.0 * k);
    let f = rng.uniform(-4.0 * k, 4.0 * k);
    AffineParams { a, b, c, d, e, f }
}

pub fn apply_affine(img: &GreyImage, p: &AffineParams) -> Result<GreyImage, TransformError> {
    let all = [p.a, p.b, p.c, p.d, p.e, p.f];
    if all.iter().any(|v| !v.is_finite()) {
        return Err(invalid("affine", "non-finite matrix entry"));
    }
    Ok(GreyImage::from_fn(|x, y| {
        let u = x as f64 - CENTER;
        let v = y as f64 - CENTER;
        let sx = math::round(p.a * u + p.b * v + p.c + CENTER);
        let sy = math::round(p.d * u + p.e * v + p.f + CENTER);
        if sx.abs() > 1e6 || sy.abs() > 1e6 {
            return 0.0;
        }
        img.get_or(sx as i64, sy as i64, 0.0) as f64
    }))
}

// ------------------------------------------------------------------ elastic

/// Smoothed random displacement fields (pixels), one value per pixel.
#[derive(Clone, Debug, PartialEq)]
pub struct ElasticParams {
    pub alpha: f64,
    pub sigma: f64,
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
}

pub fn elastic_alpha(complexity: Complexity) -> f64 {
    math::cbrt(complexity.value()) * 10.0
}

pub fn elastic_sigma(complexity: Complexity) -> f64 {
    10.0 - 7.0 * math::cbrt(complexity.value())
}

fn smooth_and_scale(mut field: Vec<f64>, kernel: &[f64], alpha: f64) -> Vec<f64> {
    field = convolve_field(&field, kernel);
    let peak = field.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if peak > 0.0 { alpha / peak } else { 0.0 };
    for v in &mut field {
        *v *= scale;
    }
    field
}

/// Draws 1024 uniforms on `[-1, 1]` for `dx`, then 1024 for `dy`. Each
/// field is blurred with a Gaussian of std `sigma` (kernel radius
/// `ceil(3σ)`), rescaled to peak magnitude 1 and multiplied by `alpha`.
pub fn sample_elastic(rng: &mut RngStream, complexity: Complexity) -> ElasticParams {
    let alpha = elastic_alpha(complexity);
    let sigma = elastic_sigma(complexity);
    let raw_dx: Vec<f64> = (0..PIXELS).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let raw_dy: Vec<f64> = (0..PIXELS).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let radius = (math::ceil(3.0 * sigma) as usize).min(SIZE - 1);
    let kernel = gaussian_kernel_1d(2 * radius + 1, sigma * sigma).expect("sigma is at least 3");
    ElasticParams {
        alpha,
        sigma,
        dx: smooth_and_scale(raw_dx, &kernel, alpha),
        dy: smooth_and_scale(raw_dy, &kernel, alpha),
    }
}

impl ElasticParams {
    pub fn conforms(&self, complexity: Complexity) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
        let bound = self.alpha * (1.0 + 1e-12);
        close(self.alpha, elastic_alpha(complexity))
            && close(self.sigma, elastic_sigma(complexity))
            && self.dx.iter().chain(&self.dy).all(|v| v.abs() <= bound)
    }
}

pub fn apply_elastic(img: &GreyImage, p: &ElasticParams) -> Result<GreyImage, TransformError> {
    if p.dx.len() != PIXELS || p.dy.len() != PIXELS {
        return Err(invalid("elastic", "displacement fields must hold 1024 values"));
    }
    if !(p.alpha >= 0.0) || p.dx.iter().chain(&p.dy).any(|v| !v.is_finite()) {
        return Err(invalid("elastic", "non-finite or negative displacement"));
    }
    Ok(GreyImage::from_fn(|x, y| {
        let i = y * SIZE + x;
        bilinear_sample(img, x as f64 + p.dx[i], y as f64 + p.dy[i]) as f64
    }))
}

// -------------------------------------------------------------------- pinch

/// Disk radius for 32×32 images.
pub const PINCH_RADIUS: f64 = SIZE as f64 / 2.0;

#[derive(Clone, Debug, PartialEq)]
pub struct PinchParams {
    pub pinch: f64,
    pub radius: f64,
    pub center: (f64, f64),
}

/// Draws: pinch (1).
pub fn sample_pinch(rng: &mut RngStream, complexity: Complexity) -> PinchParams {
    let k = complexity.value();
    PinchParams {
        pinch: rng.uniform(-k, 0.7 * k),
        radius: PINCH_RADIUS,
        center: (CENTER, CENTER),
    }
}

impl PinchParams {
    pub fn conforms(&self, complexity: Complexity) -> bool {
        let k = complexity.value();
        (-k..=0.7 * k).contains(&self.pinch)
    }
}

/// Distance from the center at which a pixel at distance `d1` reads its
/// value: `sin(π·d1 / 2r)^(-pinch) · d1`.
pub fn pinch_source_distance(d1: f64, radius: f64, pinch: f64) -> f64 {
    math::pow(math::sin(PI * d1 / (2.0 * radius)), -pinch) * d1
}

pub fn apply_pinch(img: &GreyImage, p: &PinchParams) -> Result<GreyImage, TransformError> {
    if !p.pinch.is_finite() || !(p.radius > 0.0) || !p.center.0.is_finite() || !p.center.1.is_finite() {
        return Err(invalid("pinch", "non-finite exponent or non-positive radius"));
    }
    let (cx, cy) = p.center;
    Ok(GreyImage::from_fn(|x, y| {
        let (vx, vy) = (x as f64 - cx, y as f64 - cy);
        let d1 = math::hypot(vx, vy);
        if d1 == 0.0 || d1 > p.radius {
            return img.get(x, y) as f64;
        }
        let ratio = pinch_source_distance(d1, p.radius, p.pinch) / d1;
        bilinear_sample(img, cx + vx * ratio, cy + vy * ratio) as f64
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn glyphish() -> GreyImage {
        GreyImage::from_fn(|x, y| {
            let bar = (14..18).contains(&x) && (4..28).contains(&y);
            let arm = (8..24).contains(&x) && (6..9).contains(&y);
            if bar || arm { 1.0 } else { ((x * 5 + y * 3) % 17) as f64 / 40.0 }
        })
    }

    #[test]
    fn thickness_rank_zero_is_identity() {
        let img = glyphish();
        for mode in [MorphMode::Dilate, MorphMode::Erode] {
            let out = apply_thickness(&img, &ThicknessParams { mode, elem_rank: 0 }).unwrap();
            assert_eq!(out, img);
        }
        assert!(apply_thickness(&img, &ThicknessParams { mode: MorphMode::Erode, elem_rank: 10 }).is_err());
    }

    #[test]
    fn thickness_ranks_at_full_complexity() {
        assert_eq!(thickness_max_rank(MorphMode::Dilate, Complexity::ONE), 9);
        assert_eq!(thickness_max_rank(MorphMode::Erode, Complexity::ONE), 6);
        assert_eq!(thickness_max_rank(MorphMode::Dilate, Complexity::ZERO), 0);
        let c = Complexity::new(0.35).unwrap();
        assert_eq!(thickness_max_rank(MorphMode::Dilate, c), 4);
        assert_eq!(thickness_max_rank(MorphMode::Erode, c), 2);
    }

    #[test]
    fn thickness_dot_rank3_dilates_to_block() {
        let mut img = GreyImage::zeros();
        img.set(5, 5, 1.0);
        let out = apply_thickness(&img, &ThicknessParams { mode: MorphMode::Dilate, elem_rank: 3 }).unwrap();
        let lit: Vec<(usize, usize)> = (0..SIZE)
            .flat_map(|y| (0..SIZE).map(move |x| (x, y)))
            .filter(|&(x, y)| out.get(x, y) == 1.0)
            .collect();
        let want: Vec<(usize, usize)> = (4..=6).flat_map(|y| (4..=6).map(move |x| (x, y))).collect();
        assert_eq!(lit, want);
    }

    #[test]
    fn slant_zero_is_identity() {
        let img = glyphish();
        let p = SlantParams { slant: 0.0, direction: Direction::Left };
        assert_eq!(apply_slant(&img, &p).unwrap(), img);
    }

    #[test]
    fn slant_shears_vertical_bar_into_staircase() {
        let img = GreyImage::from_fn(|x, _| if x == 15 { 1.0 } else { 0.0 });
        let p = SlantParams { slant: 0.5, direction: Direction::Right };
        let out = apply_slant(&img, &p).unwrap();
        for y in 0..SIZE {
            let shift = (0.5 * (15.5 - y as f64)).round() as i64;
            let col = 15 + shift;
            for x in 0..SIZE {
                let want = if x as i64 == col { 1.0 } else { 0.0 };
                assert_eq!(out.get(x, y), want, "row {y}");
            }
        }
        // full-strength slant never shifts a row by more than its height
        let p = SlantParams { slant: 1.0, direction: Direction::Left };
        for y in 0..SIZE {
            assert!(p.row_shift(y).unsigned_abs() as f64 <= (15.5 - y as f64).abs().round());
        }
    }

    #[test]
    fn affine_identity_and_shift() {
        let img = glyphish();
        assert_eq!(apply_affine(&img, &AffineParams::IDENTITY).unwrap(), img);
        let shift = AffineParams { c: 4.0, ..AffineParams::IDENTITY };
        let out = apply_affine(&img, &shift).unwrap();
        for y in 0..SIZE {
            for x in 0..SIZE {
                let want = if x + 4 < SIZE { img.get(x + 4, y) } else { 0.0 };
                assert_eq!(out.get(x, y), want);
            }
        }
        let bad = AffineParams { a: f64::NAN, ..AffineParams::IDENTITY };
        assert!(apply_affine(&img, &bad).is_err());
    }

    #[test]
    fn affine_at_zero_complexity_samples_identity() {
        let mut rng = RngStream::new(4);
        let p = sample_affine(&mut rng, Complexity::ZERO);
        assert_eq!(p, AffineParams::IDENTITY);
    }

    #[test]
    fn elastic_strength_schedule() {
        assert_eq!(elastic_alpha(Complexity::ONE), 10.0);
        assert_eq!(elastic_sigma(Complexity::ONE), 3.0);
        assert_eq!(elastic_alpha(Complexity::ZERO), 0.0);
        assert_eq!(elastic_sigma(Complexity::ZERO), 10.0);
    }

    #[test]
    fn elastic_constant_image_stays_constant() {
        let img = GreyImage::filled(1.0);
        let mut rng = RngStream::new(8);
        let p = sample_elastic(&mut rng, Complexity::new(0.05).unwrap());
        assert!(p.conforms(Complexity::new(0.05).unwrap()));
        let out = apply_elastic(&img, &p).unwrap();
        // constant inside: only pixels whose source leaves the grid change
        for y in 0..SIZE {
            for x in 0..SIZE {
                let i = y * SIZE + x;
                let (sx, sy) = (x as f64 + p.dx[i], y as f64 + p.dy[i]);
                if sx >= 0.0 && sy >= 0.0 && sx <= 31.0 && sy <= 31.0 {
                    assert!((out.get(x, y) - 1.0).abs() < 1e-6);
                }
            }
        }
        let bad = ElasticParams { dx: vec![0.0; 3], ..p };
        assert!(apply_elastic(&img, &bad).is_err());
    }

    #[test]
    fn pinch_formula_fixed_points() {
        let r = 16.0;
        assert!((pinch_source_distance(r, r, 0.8) - r).abs() < 1e-9);
        assert!((pinch_source_distance(r, r, -0.5) - r).abs() < 1e-9);
        let want = r / 2.0_f64.sqrt();
        assert!((pinch_source_distance(r / 2.0, r, 1.0) - want).abs() < 1e-9);
        assert_eq!(pinch_source_distance(5.0, r, 0.0), 5.0);
    }

    #[test]
    fn pinch_zero_is_identity_and_pulls_inward_when_positive() {
        let img = glyphish();
        let p = PinchParams { pinch: 0.0, radius: PINCH_RADIUS, center: (CENTER, CENTER) };
        assert_eq!(apply_pinch(&img, &p).unwrap(), img);
        // a ring at distance ~8 moves inward for positive pinch (reads farther out)
        let d = pinch_source_distance(8.0, 16.0, 0.5);
        assert!(d > 8.0);
    }
}
