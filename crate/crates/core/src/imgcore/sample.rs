use super::{clamp_unit, GreyImage, CENTER};
use crate::math;

/// Bilinear interpolation at `(x, y)`; neighbours off the grid read 0.
pub fn bilinear_sample(img: &GreyImage, x: f64, y: f64) -> f32 {
    if !x.is_finite() || !y.is_finite() {
        return 0.0;
    }
    let x0 = math::floor(x);
    let y0 = math::floor(y);
    let fx = x - x0;
    let fy = y - y0;
    let (xi, yi) = (x0 as i64, y0 as i64);
    let p = |dx: i64, dy: i64| img.get_or(xi + dx, yi + dy, 0.0) as f64;
    let top = p(0, 0) * (1.0 - fx) + p(1, 0) * fx;
    let bottom = p(0, 1) * (1.0 - fx) + p(1, 1) * fx;
    clamp_unit(top * (1.0 - fy) + bottom * fy)
}

/// Catmull–Rom weights for the four taps at offsets -1, 0, 1, 2.
fn cubic_weights(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        -0.5 * t3 + t2 - 0.5 * t,
        1.5 * t3 - 2.5 * t2 + 1.0,
        -1.5 * t3 + 2.0 * t2 + 0.5 * t,
        0.5 * t3 - 0.5 * t2,
    ]
}

/// Bicubic (Catmull–Rom, a = -0.5) interpolation over the 4×4
/// neighbourhood; taps off the grid read 0. The kernel reproduces linear
/// ramps exactly, and the result is clamped to `[0, 1]`.
pub fn bicubic_sample(img: &GreyImage, x: f64, y: f64) -> f32 {
    if !x.is_finite() || !y.is_finite() {
        return 0.0;
    }
    let x0 = math::floor(x);
    let y0 = math::floor(y);
    let wx = cubic_weights(x - x0);
    let wy = cubic_weights(y - y0);
    let (xi, yi) = (x0 as i64, y0 as i64);
    let mut acc = 0.0;
    for (j, wyj) in wy.iter().enumerate() {
        let mut row = 0.0;
        for (i, wxi) in wx.iter().enumerate() {
            row += wxi * img.get_or(xi + i as i64 - 1, yi + j as i64 - 1, 0.0) as f64;
        }
        acc += wyj * row;
    }
    clamp_unit(acc)
}

/// Rotates about the image center by `degrees` (counter-clockwise on
/// screen) with bicubic resampling.
pub fn rotate_bicubic(img: &GreyImage, degrees: f64) -> GreyImage {
    let theta = degrees.to_radians();
    let (s, c) = (math::sin(theta), math::cos(theta));
    GreyImage::from_fn(|x, y| {
        let u = x as f64 - CENTER;
        let v = y as f64 - CENTER;
        // inverse rotation maps output to source
        let sx = c * u - s * v + CENTER;
        let sy = s * u + c * v + CENTER;
        bicubic_sample(img, sx, sy) as f64
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imgcore::SIZE;

    fn patterned() -> GreyImage {
        GreyImage::from_fn(|x, y| ((x * 31 + y * 17) % 23) as f64 / 22.0)
    }

    #[test]
    fn bilinear_lattice_points_are_exact() {
        let img = patterned();
        for y in 0..SIZE {
            for x in 0..SIZE {
                assert_eq!(bilinear_sample(&img, x as f64, y as f64), img.get(x, y));
            }
        }
        assert_eq!(bilinear_sample(&img, 5.0, 7.0), img.get(5, 7));
    }

    #[test]
    fn bilinear_checker_center_is_half() {
        let mut img = GreyImage::zeros();
        img.set(11, 10, 1.0);
        img.set(10, 11, 1.0);
        // patch {0,1;1,0} with its top-left at (10,10)
        assert_eq!(bilinear_sample(&img, 10.5, 10.5), 0.5);
    }

    #[test]
    fn constant_fields_are_preserved_inside() {
        let img = GreyImage::filled(0.625);
        for &(x, y) in &[(3.3, 4.7), (15.5, 15.5), (29.9, 1.01)] {
            assert_eq!(bilinear_sample(&img, x, y), 0.625);
        }
        for &(x, y) in &[(3.3, 4.7), (15.5, 15.5), (28.9, 1.01)] {
            assert!((bicubic_sample(&img, x, y) - 0.625).abs() < 1e-6);
        }
    }

    #[test]
    fn outside_reads_background() {
        let img = GreyImage::filled(1.0);
        assert_eq!(bilinear_sample(&img, -5.0, 3.0), 0.0);
        assert_eq!(bilinear_sample(&img, 40.0, 40.0), 0.0);
        assert_eq!(bicubic_sample(&img, 3.0, -9.0), 0.0);
        assert_eq!(bilinear_sample(&img, f64::NAN, 1.0), 0.0);
    }

    #[test]
    fn bicubic_lattice_points_are_exact() {
        let img = patterned();
        for y in 0..SIZE {
            for x in 0..SIZE {
                assert_eq!(bicubic_sample(&img, x as f64, y as f64), img.get(x, y));
            }
        }
    }

    #[test]
    fn bicubic_reproduces_linear_ramp() {
        let img = GreyImage::from_fn(|x, _| x as f64 / 31.0);
        for x in 2..28 {
            let got = bicubic_sample(&img, x as f64 + 0.5, 12.25) as f64;
            let want = (x as f64 + 0.5) / 31.0;
            assert!((got - want).abs() < 1e-6, "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn quarter_turns_move_pixels_to_pixels() {
        let mut img = GreyImage::zeros();
        img.set(20, 15, 1.0);
        let r = rotate_bicubic(&img, 90.0);
        let hot: Vec<_> = (0..SIZE * SIZE)
            .filter(|&i| r.pixels()[i] > 0.5)
            .map(|i| (i % SIZE, i / SIZE))
            .collect();
        assert_eq!(hot.len(), 1);
        let back = rotate_bicubic(&r, -90.0);
        assert!((back.get(20, 15) - 1.0).abs() < 1e-6);
    }
}
