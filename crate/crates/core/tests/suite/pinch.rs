use glyphwarp_core::transforms::{apply_pinch, pinch_source_distance, PinchParams, PINCH_RADIUS};
use glyphwarp_core::GreyImage;

const TOL: f64 = 1e-9;

pub fn boundary_is_fixed_for_any_exponent() {
    for r in [1.0, 7.5, PINCH_RADIUS, 40.0] {
        for i in 0..=200 {
            let p = -1.0 + 1.7 * i as f64 / 200.0;
            let d = pinch_source_distance(r, r, p);
            assert!((d - r).abs() <= TOL, "r={r} p={p}: {d}");
        }
    }
}

pub fn half_radius_with_unit_pinch() {
    // sin(π/4)^(-1) · r/2 = r/√2
    for r in [2.0, PINCH_RADIUS, 33.0] {
        let d = pinch_source_distance(r / 2.0, r, 1.0);
        assert!((d - r / std::f64::consts::SQRT_2).abs() <= TOL, "r={r}: {d}");
    }
}

pub fn zero_pinch_is_identity_distance() {
    for i in 1..100 {
        let d1 = PINCH_RADIUS * i as f64 / 100.0;
        assert!((pinch_source_distance(d1, PINCH_RADIUS, 0.0) - d1).abs() <= TOL);
    }
}

pub fn pixels_outside_the_disk_are_untouched() {
    let img = GreyImage::from_fn(|x, y| ((x * 5 + y * 3) % 11) as f64 / 10.0);
    let p = PinchParams { pinch: 0.6, radius: 10.0, center: (15.5, 15.5) };
    let out = apply_pinch(&img, &p).unwrap();
    for y in 0..32 {
        for x in 0..32 {
            if (x as f64 - 15.5).hypot(y as f64 - 15.5) > 10.0 {
                assert_eq!(out.get(x, y), img.get(x, y));
            }
        }
    }
}
