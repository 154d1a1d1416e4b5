//! Fixed, seeded image banks used by the background and scratch modules.

use alloc::vec;
use alloc::vec::Vec;

use crate::imgcore::{rasterize_strokes, GreyImage, Point, CENTER, PIXELS, SIZE};
use crate::math;
use crate::rng::RngStream;

pub const BACKGROUND_COUNT: usize = 64;
pub const STROKE_COUNT: usize = 500;

const BACKGROUND_SEED: u64 = 0xB4C6_0000_0000_0001;
const STROKE_SEED: u64 = 0x5C2A_7C00_0000_0001;

/// Background textures and scratch strokes, regenerated identically on
/// every construction.
#[derive(Clone, Debug)]
pub struct Banks {
    backgrounds: Vec<GreyImage>,
    strokes: Vec<GreyImage>,
}

impl Default for Banks {
    fn default() -> Self {
        Self::standard()
    }
}

impl Banks {
    pub fn standard() -> Self {
        let bg = RngStream::new(BACKGROUND_SEED);
        let st = RngStream::new(STROKE_SEED);
        Banks {
            backgrounds: (0..BACKGROUND_COUNT as u64).map(|i| texture(&mut bg.substream(i))).collect(),
            strokes: (0..STROKE_COUNT as u64).map(|i| stroke(&mut st.substream(i))).collect(),
        }
    }

    pub fn backgrounds(&self) -> &[GreyImage] {
        &self.backgrounds
    }

    pub fn strokes(&self) -> &[GreyImage] {
        &self.strokes
    }
}

fn smoothstep(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

/// One octave of wrap-around value noise with lattice spacing `cell`
/// (a divisor of 32, so the result tiles).
fn value_noise(rng: &mut RngStream, cell: usize) -> Vec<f64> {
    let n = SIZE / cell;
    let lattice: Vec<f64> = (0..n * n).map(|_| rng.unit()).collect();
    let at = |i: usize, j: usize| lattice[(j % n) * n + (i % n)];
    let mut out = vec![0.0; PIXELS];
    for y in 0..SIZE {
        for x in 0..SIZE {
            let (i, j) = (x / cell, y / cell);
            let tx = smoothstep((x % cell) as f64 / cell as f64);
            let ty = smoothstep((y % cell) as f64 / cell as f64);
            let top = at(i, j) * (1.0 - tx) + at(i + 1, j) * tx;
            let bottom = at(i, j + 1) * (1.0 - tx) + at(i + 1, j + 1) * tx;
            out[y * SIZE + x] = top * (1.0 - ty) + bottom * ty;
        }
    }
    out
}

/// Multi-octave value noise, optionally blended with a linear gradient,
/// stretched to `[0, 1]`.
fn texture(rng: &mut RngStream) -> GreyImage {
    let mut acc = vec![0.0; PIXELS];
    let mut amp = 1.0;
    for cell in [16, 8, 4, 2] {
        for (a, v) in acc.iter_mut().zip(value_noise(rng, cell)) {
            *a += amp * v;
        }
        amp *= rng.uniform(0.35, 0.65);
    }
    if rng.bernoulli(0.5) {
        let theta = rng.uniform(0.0, 2.0 * core::f64::consts::PI);
        let weight = rng.uniform(0.5, 1.5);
        let (c, s) = (math::cos(theta), math::sin(theta));
        for y in 0..SIZE {
            for x in 0..SIZE {
                let t = ((x as f64 - CENTER) * c + (y as f64 - CENTER) * s) / SIZE as f64;
                acc[y * SIZE + x] += weight * t;
            }
        }
    }
    let lo = acc.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = acc.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    GreyImage::from_fn(|x, y| (acc[y * SIZE + x] - lo) / span)
}

/// A near-vertical, slightly curved bar 20–30 px long, drawn 5–6 px wide
/// so that the two scratch erosions leave a 1–2 px line.
fn stroke(rng: &mut RngStream) -> GreyImage {
    let length = rng.uniform(20.0, 30.0);
    let width = rng.uniform(5.0, 6.0);
    let tilt = rng.uniform(-0.2, 0.2);
    let bow = rng.uniform(-2.0, 2.0);
    let (s, c) = (math::sin(tilt), math::cos(tilt));
    let pts: Vec<Point> = (0..=12)
        .map(|k| {
            let t = k as f64 / 12.0 - 0.5;
            // quadratic bow across the bar
            let along = t * length;
            let across = bow * (1.0 - 4.0 * t * t);
            (CENTER + across * c - along * s, CENTER + across * s + along * c)
        })
        .collect();
    rasterize_strokes(&[pts], width)
}
