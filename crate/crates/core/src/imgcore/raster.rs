use alloc::vec::Vec;

use super::{GreyImage, SIZE};
use crate::math;

/// A point in pixel coordinates (x right, y down, pixel centers on integers).
pub type Point = (f64, f64);

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (vx, vy) = (b.0 - a.0, b.1 - a.1);
    let (wx, wy) = (p.0 - a.0, p.1 - a.1);
    let len2 = vx * vx + vy * vy;
    let t = if len2 > 0.0 { ((wx * vx + wy * vy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    math::hypot(wx - t * vx, wy - t * vy)
}

/// Draws antialiased pen strokes of the given `width` (pixels). Each inner
/// vector is one polyline; a single-point polyline draws a dot.
///
/// Intensity at a pixel is `clamp(width/2 + 0.5 - d)` where `d` is the
/// distance from the pixel center to the nearest stroke.
pub fn rasterize_strokes(strokes: &[Vec<Point>], width: f64) -> GreyImage {
    let half = width / 2.0 + 0.5;
    // bounding box of everything, padded by the pen radius
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for p in strokes.iter().flatten() {
        x0 = x0.min(p.0);
        y0 = y0.min(p.1);
        x1 = x1.max(p.0);
        y1 = y1.max(p.1);
    }
    let mut img = GreyImage::zeros();
    if x0 > x1 {
        return img;
    }
    let lo = |v: f64| math::floor(v - half).max(0.0) as usize;
    let hi = |v: f64| (math::ceil(v + half).max(-1.0) as i64).min(SIZE as i64 - 1);
    let (px0, py0, px1, py1) = (lo(x0), lo(y0), hi(x1), hi(y1));
    if px1 < 0 || py1 < 0 {
        return img;
    }
    for y in py0..=py1 as usize {
        for x in px0..=px1 as usize {
            let p = (x as f64, y as f64);
            let mut d = f64::MAX;
            for s in strokes {
                match s.len() {
                    0 => {}
                    1 => d = d.min(segment_distance(p, s[0], s[0])),
                    _ => {
                        for w in s.windows(2) {
                            d = d.min(segment_distance(p, w[0], w[1]));
                        }
                    }
                }
            }
            let v = (half - d).clamp(0.0, 1.0);
            if v > 0.0 {
                img.set(x, y, v as f32);
            }
        }
    }
    img
}
