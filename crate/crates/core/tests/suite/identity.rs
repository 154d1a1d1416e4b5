use glyphwarp_core::glyphs::{synthetic_source, GlyphSource};
use glyphwarp_core::transforms::*;
use glyphwarp_core::{ClassSet, GreyImage, RngStream};

fn images() -> Vec<GreyImage> {
    let src = synthetic_source(ClassSet::All, 1);
    let mut rng = RngStream::new(2);
    let mut out: Vec<GreyImage> = (0..40).map(|_| src.draw(&mut rng).image).collect();
    out.push(GreyImage::from_fn(|x, y| ((x * 7 + y * 13) % 17) as f64 / 16.0));
    out.push(GreyImage::filled(1.0));
    out.push(GreyImage::zeros());
    out
}

pub fn samplers_at_zero_complexity_leave_images_untouched() {
    let banks = Banks::standard();
    let k = Complexity::ZERO;
    for (i, img) in images().iter().enumerate() {
        let rng = RngStream::new(100 + i as u64);
        let r = |n: u64| rng.substream(n);
        assert_eq!(&apply_thickness(img, &sample_thickness(&mut r(0), k)).unwrap(), img);
        assert_eq!(&apply_slant(img, &sample_slant(&mut r(1), k)).unwrap(), img);
        assert_eq!(&apply_affine(img, &sample_affine(&mut r(2), k)).unwrap(), img);
        assert_eq!(&apply_elastic(img, &sample_elastic(&mut r(3), k)).unwrap(), img);
        assert_eq!(&apply_pinch(img, &sample_pinch(&mut r(4), k)).unwrap(), img);
        assert_eq!(&apply_motion_blur(img, &sample_motion_blur(&mut r(5), k)).unwrap(), img);
        assert_eq!(&apply_gaussian_noise(img, &sample_gaussian_noise(&mut r(6), k)).unwrap(), img);
        assert_eq!(&apply_permute(img, &sample_permute(&mut r(7), k)).unwrap(), img);
        assert_eq!(&apply_salt_pepper(img, &sample_salt_pepper(&mut r(8), k)).unwrap(), img);
        assert_eq!(&apply_background(img, &sample_background(&mut r(9), k, &banks)).unwrap(), img);

        let mut contrast = sample_contrast(&mut r(10), k);
        assert_eq!(contrast.contrast, 1.0);
        contrast.invert = false;
        assert_eq!(&apply_contrast(img, &contrast).unwrap(), img);
    }
}

pub fn skipped_parameters_are_identity() {
    for img in images() {
        assert_eq!(apply_occlusion(&img, &OcclusionParams::skipped()).unwrap(), img);
        assert_eq!(apply_smoothing(&img, &SmoothingParams::skipped()).unwrap(), img);
        assert_eq!(apply_permute(&img, &PermuteParams::skipped()).unwrap(), img);
        assert_eq!(apply_scratches(&img, &ScratchParams::skipped()).unwrap(), img);
    }
}

pub fn zero_complexity_samples_identity_parameters() {
    let mut rng = RngStream::new(5);
    for _ in 0..200 {
        assert_eq!(sample_thickness(&mut rng, Complexity::ZERO).elem_rank, 0);
        assert_eq!(sample_slant(&mut rng, Complexity::ZERO).slant, 0.0);
        assert_eq!(sample_affine(&mut rng, Complexity::ZERO), AffineParams::IDENTITY);
        assert_eq!(sample_pinch(&mut rng, Complexity::ZERO).pinch, 0.0);
        assert_eq!(sample_motion_blur(&mut rng, Complexity::ZERO).length, 0.0);
    }
}
