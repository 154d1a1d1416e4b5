use glyphwarp_core::glyphs::{synthetic_source, GlyphSource};
use glyphwarp_core::nnet::{pretrain, SdaModel, TrainConfig};
use glyphwarp_core::{ClassSet, GreyImage, RngStream};

pub const REQUIRED_RATIO: f64 = 0.8;

fn glyphs(n: usize) -> Vec<GreyImage> {
    let src = synthetic_source(ClassSet::All, 4);
    let mut rng = RngStream::new(40);
    (0..n).map(|_| src.draw(&mut rng).image).collect()
}

fn mean_reconstruction(sda: &SdaModel, images: &[GreyImage]) -> f64 {
    let layer = sda.layer(0);
    images.iter().map(|img| layer.reconstruction_loss(&img.to_f64_vec())).sum::<f64>() / images.len() as f64
}

/// Mean first-layer reconstruction loss before and after 50 pretraining
/// epochs on 500 glyphs.
pub fn first_layer_reconstruction_improves() -> (f64, f64) {
    let images = glyphs(500);
    let mut sda = SdaModel::for_images(64, 0.2, 11);
    let before = mean_reconstruction(&sda, &images);
    let cfg = TrainConfig { pretrain_epochs: 50, seed: 11, ..TrainConfig::default() };
    let history = pretrain(&mut sda, &images, &cfg).unwrap();
    let after = mean_reconstruction(&sda, &images);
    assert_eq!(history.len(), 3);
    assert!(history.iter().all(|h| h.len() == 50));
    assert!(after <= REQUIRED_RATIO * before, "{after} vs initial {before}");
    (before, after)
}

pub fn pretraining_is_deterministic() {
    let images = glyphs(40);
    let cfg = TrainConfig { pretrain_epochs: 2, seed: 3, ..TrainConfig::default() };
    let mut a = SdaModel::for_images(16, 0.1, 1);
    let mut b = SdaModel::for_images(16, 0.1, 1);
    assert_eq!(pretrain(&mut a, &images, &cfg).unwrap(), pretrain(&mut b, &images, &cfg).unwrap());
    assert_eq!(a.layer(2).encoder.w, b.layer(2).encoder.w);
}
