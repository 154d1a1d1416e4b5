//! Sampler statistics over 10⁵ draws per complexity level.

use std::time::{Duration, Instant};

use glyphwarp_core::imgcore::MorphMode;
use glyphwarp_core::transforms::*;
use glyphwarp_core::{GreyImage, RngStream};

const DRAWS: usize = 100_000;
const LEVELS: [f64; 3] = [0.35, 0.7, 1.0];
const MEAN_TOLERANCE: f64 = 0.01;
const RATE_TOLERANCE: f64 = 0.015;

#[derive(Default)]
struct Mean {
    sum: f64,
    n: usize,
}

impl Mean {
    fn push(&mut self, v: f64) {
        self.sum += v;
        self.n += 1;
    }

    fn get(&self) -> f64 {
        self.sum / self.n as f64
    }

    /// Empirical mean within 1 % of the range width of the midpoint.
    fn check_uniform(&self, what: &str, lo: f64, hi: f64) {
        let mid = (lo + hi) / 2.0;
        let tol = MEAN_TOLERANCE * (hi - lo);
        assert!(self.n > 1000, "{what}: only {} samples", self.n);
        assert!((self.get() - mid).abs() <= tol, "{what}: mean {} vs midpoint {mid} ± {tol}", self.get());
    }

    fn check_rate(&self, what: &str, p: f64) {
        assert!((self.get() - p).abs() <= RATE_TOLERANCE, "{what}: rate {} vs {p}", self.get());
    }
}

fn rng_for(tag: u64, k: f64) -> RngStream {
    RngStream::new(0xD157 + tag).substream((k * 100.0) as u64)
}

fn thickness(k: Complexity) {
    let mut rng = rng_for(0, k.value());
    let (mut dilate, mut rank_d, mut rank_e) = (Mean::default(), Mean::default(), Mean::default());
    for _ in 0..DRAWS {
        let p = sample_thickness(&mut rng, k);
        assert!(p.conforms(k), "{p:?}");
        let is_dilate = p.mode == MorphMode::Dilate;
        dilate.push(is_dilate as u8 as f64);
        if is_dilate { &mut rank_d } else { &mut rank_e }.push(p.elem_rank as f64);
    }
    dilate.check_rate("thickness dilation", 0.5);
    rank_d.check_uniform("dilation rank", 0.0, thickness_max_rank(MorphMode::Dilate, k) as f64);
    rank_e.check_uniform("erosion rank", 0.0, thickness_max_rank(MorphMode::Erode, k) as f64);
}

fn slant(k: Complexity) {
    let mut rng = rng_for(1, k.value());
    let (mut s, mut right) = (Mean::default(), Mean::default());
    for _ in 0..DRAWS {
        let p = sample_slant(&mut rng, k);
        assert!(p.conforms(k), "{p:?}");
        s.push(p.slant);
        right.push((p.direction == Direction::Right) as u8 as f64);
    }
    s.check_uniform("slant", -k.value(), k.value());
    right.check_rate("slant direction", 0.5);
}

fn affine(k: Complexity) {
    let kv = k.value();
    let mut rng = rng_for(2, kv);
    let mut m: [Mean; 6] = Default::default();
    for _ in 0..DRAWS {
        let p = sample_affine(&mut rng, k);
        assert!(p.conforms(k), "{p:?}");
        for (acc, v) in m.iter_mut().zip([p.a, p.b, p.c, p.d, p.e, p.f]) {
            acc.push(v);
        }
    }
    m[0].check_uniform("affine a", 1.0 - 3.0 * kv, 1.0 + 3.0 * kv);
    m[1].check_uniform("affine b", -3.0 * kv, 3.0 * kv);
    m[2].check_uniform("affine c", -4.0 * kv, 4.0 * kv);
    m[3].check_uniform("affine d", -3.0 * kv, 3.0 * kv);
    m[4].check_uniform("affine e", 1.0 - 3.0 * kv, 1.0 + 3.0 * kv);
    m[5].check_uniform("affine f", -4.0 * kv, 4.0 * kv);
}

fn elastic(k: Complexity) {
    let mut rng = rng_for(3, k.value());
    let mut field = Mean::default();
    for _ in 0..DRAWS {
        let p = sample_elastic(&mut rng, k);
        assert!(p.conforms(k));
        field.push(p.dx[528]);
    }
    // symmetric noise: the smoothed displacement is centered on zero
    field.check_uniform("elastic dx", -elastic_alpha(k), elastic_alpha(k));
}

fn pinch(k: Complexity) {
    let mut rng = rng_for(4, k.value());
    let mut m = Mean::default();
    for _ in 0..DRAWS {
        let p = sample_pinch(&mut rng, k);
        assert!(p.conforms(k), "{p:?}");
        m.push(p.pinch);
    }
    m.check_uniform("pinch", -k.value(), 0.7 * k.value());
}

fn motion_blur(k: Complexity) {
    let mut rng = rng_for(5, k.value());
    let (mut angle, mut len) = (Mean::default(), Mean::default());
    for _ in 0..DRAWS {
        let p = sample_motion_blur(&mut rng, k);
        assert!(p.conforms(k) && (0.0..360.0).contains(&p.angle) && p.length >= 0.0, "{p:?}");
        angle.push(p.angle);
        len.push(p.length);
    }
    angle.check_uniform("motion angle", 0.0, 360.0);
    // E|N(0, s²)| = s·sqrt(2/π)
    let want = 3.0 * k.value() * (2.0 / std::f64::consts::PI).sqrt();
    assert!((len.get() - want).abs() <= 0.02 * want, "motion length mean {} vs {want}", len.get());
}

fn occlusion(k: Complexity) {
    let mut rng = rng_for(6, k.value());
    let (mut applied, mut w) = (Mean::default(), Mean::default());
    let occluder = |_: &mut RngStream| GreyImage::filled(1.0);
    for _ in 0..DRAWS {
        let p = sample_occlusion(&mut rng, k, occluder);
        assert!(p.conforms(k), "{:?}", (p.src, p.dst));
        applied.push(p.applied as u8 as f64);
        if p.applied {
            w.push(p.src.w as f64);
        }
    }
    applied.check_rate("occlusion applied", apply_rate::OCCLUSION);
    w.check_uniform("occlusion width", 2.0, OcclusionParams::max_side(k) as f64);
}

fn smoothing(k: Complexity) {
    let mut rng = rng_for(7, k.value());
    let (mut applied, mut var) = (Mean::default(), Mean::default());
    for _ in 0..DRAWS {
        let p = sample_smoothing(&mut rng, k);
        assert!(p.conforms(k), "{p:?}");
        applied.push(p.applied as u8 as f64);
        if p.applied {
            var.push(p.variance);
        }
    }
    applied.check_rate("smoothing applied", apply_rate::SMOOTHING);
    var.check_uniform("smoothing variance", 2.0, 2.0 + 6.0 * k.value());
}

fn permute(k: Complexity) {
    let mut rng = rng_for(8, k.value());
    let mut applied = Mean::default();
    for _ in 0..DRAWS {
        let p = sample_permute(&mut rng, k);
        assert!(p.conforms(k));
        applied.push(p.applied as u8 as f64);
    }
    applied.check_rate("permute applied", apply_rate::PERMUTE);
}

fn gaussian_noise(k: Complexity) {
    let mut rng = rng_for(9, k.value());
    let mut applied = Mean::default();
    for _ in 0..DRAWS {
        let p = sample_gaussian_noise(&mut rng, k);
        assert!(p.conforms(k));
        applied.push(p.applied as u8 as f64);
    }
    applied.check_rate("gaussian noise applied", apply_rate::GAUSSIAN_NOISE);
}

fn background(k: Complexity, banks: &Banks) {
    let mut rng = rng_for(10, k.value());
    let mut strength = Mean::default();
    let top = background_max_strength(k);
    for _ in 0..DRAWS {
        let p = sample_background(&mut rng, k, banks);
        assert!(p.conforms(k), "strength {}", p.strength);
        strength.push(p.strength);
    }
    strength.check_uniform("background strength", 0.5 * top, top);
}

fn salt_pepper(k: Complexity) {
    let mut rng = rng_for(11, k.value());
    let (mut applied, mut value) = (Mean::default(), Mean::default());
    for _ in 0..DRAWS {
        let p = sample_salt_pepper(&mut rng, k);
        assert!(p.conforms(k));
        applied.push(p.applied as u8 as f64);
        if let Some(&(_, v)) = p.pixels.first() {
            value.push(v as f64);
        }
    }
    applied.check_rate("salt and pepper applied", apply_rate::SALT_PEPPER);
    value.check_uniform("salt and pepper value", 0.0, 1.0);
}

fn scratches(k: Complexity, banks: &Banks) {
    let mut rng = rng_for(12, k.value());
    let mut applied = Mean::default();
    let mut counts = [Mean::default(), Mean::default(), Mean::default()];
    for _ in 0..DRAWS {
        let p = sample_scratches(&mut rng, k, banks);
        assert!(p.conforms(k));
        applied.push(p.applied as u8 as f64);
        if p.applied {
            for (c, m) in counts.iter_mut().enumerate() {
                m.push((p.patches.len() == c + 1) as u8 as f64);
            }
        }
    }
    applied.check_rate("scratches applied", apply_rate::SCRATCHES);
    for (m, p) in counts.iter().zip([0.5, 0.3, 0.2]) {
        m.check_rate("scratch patch count", p);
    }
}

fn contrast(k: Complexity) {
    let mut rng = rng_for(13, k.value());
    let (mut c, mut inv) = (Mean::default(), Mean::default());
    for _ in 0..DRAWS {
        let p = sample_contrast(&mut rng, k);
        assert!(p.conforms(k), "{p:?}");
        c.push(p.contrast);
        inv.push(p.invert as u8 as f64);
    }
    c.check_uniform("contrast", 1.0 - 0.85 * k.value(), 1.0);
    inv.check_rate("contrast inversion", 0.5);
}

/// Panics on the first statistic out of tolerance; returns the runtime.
pub fn samplers_match_their_distributions() -> Duration {
    let banks = Banks::standard();
    let start = Instant::now();
    for kv in LEVELS {
        let k = Complexity::new(kv).unwrap();
        thickness(k);
        slant(k);
        affine(k);
        elastic(k);
        pinch(k);
        motion_blur(k);
        occlusion(k);
        smoothing(k);
        permute(k);
        gaussian_noise(k);
        background(k, &banks);
        salt_pepper(k);
        scratches(k, &banks);
        contrast(k);
    }
    start.elapsed()
}

pub fn sampled_ranges_hold_at_extremes() {
    let banks = Banks::standard();
    for kv in [0.0, 1e-9, 0.5, 1.0] {
        let k = Complexity::new(kv).unwrap();
        let mut rng = RngStream::new(77);
        for _ in 0..2000 {
            assert!(sample_thickness(&mut rng, k).conforms(k));
            assert!(sample_slant(&mut rng, k).conforms(k));
            assert!(sample_affine(&mut rng, k).conforms(k));
            assert!(sample_pinch(&mut rng, k).conforms(k));
            assert!(sample_motion_blur(&mut rng, k).conforms(k));
            assert!(sample_smoothing(&mut rng, k).conforms(k));
            assert!(sample_permute(&mut rng, k).conforms(k));
            assert!(sample_salt_pepper(&mut rng, k).conforms(k));
            assert!(sample_background(&mut rng, k, &banks).conforms(k));
            assert!(sample_scratches(&mut rng, k, &banks).conforms(k));
            assert!(sample_contrast(&mut rng, k).conforms(k));
        }
    }
}
