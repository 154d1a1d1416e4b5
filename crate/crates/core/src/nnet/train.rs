use alloc::vec::Vec;

use super::{evaluate, Classifier, NnetError};
use crate::dataset::LabeledDataset;
use crate::rng::RngStream;

/// The constant learning rates considered during model selection.
pub const LEARNING_RATES: [f64; 6] = [0.001, 0.01, 0.025, 0.075, 0.1, 0.5];

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub pretrain_learning_rate: f64,
    pub minibatch: usize,
    /// Maximum supervised epochs.
    pub epochs: usize,
    /// Epochs per autoencoder layer.
    pub pretrain_epochs: usize,
    /// Stop after this many epochs without a validation improvement.
    pub patience: Option<usize>,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.1,
            pretrain_learning_rate: 0.01,
            minibatch: 20,
            epochs: 50,
            pretrain_epochs: 10,
            patience: None,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), NnetError> {
        if self.minibatch == 0 {
            return Err(NnetError::Config("minibatch must be at least 1"));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0)
            || !(self.pretrain_learning_rate.is_finite() && self.pretrain_learning_rate >= 0.0)
        {
            return Err(NnetError::Config("learning rates must be finite and non-negative"));
        }
        Ok(())
    }
}

/// Per-epoch record of a supervised run. Index 0 of `valid_errors` is the
/// model before training.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct TrainReport {
    pub train_losses: Vec<f64>,
    pub valid_errors: Vec<f64>,
    pub best_epoch: usize,
}

impl TrainReport {
    pub fn best_valid_error(&self) -> Option<f64> {
        self.valid_errors.get(self.best_epoch).copied()
    }
}

/// Inputs as `f64` vectors and targets as output indices.
pub fn prepare(model: &impl Classifier, ds: &LabeledDataset) -> Result<(Vec<Vec<f64>>, Vec<usize>), NnetError> {
    let net = model.network();
    let targets = ds
        .items
        .iter()
        .map(|s| net.output_of(s.label).ok_or(NnetError::Label(s.label)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((ds.items.iter().map(|s| s.image.to_f64_vec()).collect(), targets))
}

/// Minibatch SGD on the negative log-likelihood with a constant learning
/// rate and a reshuffle every epoch. The model ends up holding the
/// parameters with the lowest validation error seen (earliest on ties),
/// counting the starting point. With an empty validation set the last
/// epoch is kept.
pub fn finetune<M: Classifier>(
    model: &mut M,
    train: &LabeledDataset,
    valid: &LabeledDataset,
    cfg: &TrainConfig,
) -> Result<TrainReport, NnetError> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(NnetError::EmptyDataset);
    }
    let (xs, ys) = prepare(model, train)?;
    let mut rng = RngStream::new(cfg.seed).substream(2);
    let net = model.network_mut();
    let mut grad = net.zeros_like();
    let mut order: Vec<usize> = (0..xs.len()).collect();
    let score = |n: &super::Network| {
        if valid.is_empty() {
            Ok(0.0)
        } else {
            evaluate(n, valid, None)
        }
    };

    let mut report = TrainReport::default();
    report.valid_errors.push(score(net)?);
    let mut best = net.clone();
    let mut since_best = 0;
    for epoch in 1..=cfg.epochs {
        rng.shuffle(&mut order);
        let mut total = 0.0;
        for batch in order.chunks(cfg.minibatch) {
            grad.clear();
            for &i in batch {
                total += net.nll_backprop(&xs[i], ys[i], &mut grad);
            }
            net.add_scaled(&grad, -cfg.learning_rate / batch.len() as f64);
        }
        let mean = total / xs.len() as f64;
        if !mean.is_finite() || !net.is_finite() {
            return Err(NnetError::Divergence { epoch });
        }
        report.train_losses.push(mean);
        let err = score(net)?;
        report.valid_errors.push(err);
        if valid.is_empty() || err < report.valid_errors[report.best_epoch] {
            report.best_epoch = epoch;
            best = net.clone();
            since_best = 0;
        } else {
            since_best += 1;
            if cfg.patience.is_some_and(|p| since_best >= p) {
                break;
            }
        }
    }
    *net = best;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Sample;
    use crate::imgcore::GreyImage;
    use crate::nnet::{Activation, MlpModel, Network};
    use alloc::vec;

    /// Class 0: left half lit, class 1: right half lit, with noisy levels.
    fn halves(n: usize, seed: u64) -> LabeledDataset {
        let mut rng = RngStream::new(seed);
        let items = (0..n)
            .map(|i| {
                let label = (i % 2) as u8;
                let level = rng.uniform(0.4, 1.0);
                let image = GreyImage::from_fn(|x, _| if (x < 16) == (label == 0) { level } else { 0.0 });
                Sample { image, label }
            })
            .collect();
        LabeledDataset::new(items).unwrap()
    }

    #[test]
    fn zero_rate_changes_nothing() {
        let mut m = MlpModel::new(1024, 4, &[0, 1], &mut RngStream::new(0));
        let before = m.clone();
        let cfg = TrainConfig { learning_rate: 0.0, epochs: 3, ..TrainConfig::default() };
        finetune(&mut m, &halves(40, 1), &halves(10, 2), &cfg).unwrap();
        assert_eq!(m, before);
    }

    #[test]
    fn separable_toy_is_learned() {
        let mut m = MlpModel::new(1024, 4, &[0, 1], &mut RngStream::new(0));
        let train = halves(40, 1);
        let cfg = TrainConfig { learning_rate: 0.1, epochs: 200, ..TrainConfig::default() };
        finetune(&mut m, &train, &LabeledDataset::default(), &cfg).unwrap();
        assert_eq!(evaluate(&m, &train, None).unwrap(), 0.0);
    }

    #[test]
    fn keeps_best_snapshot_not_last() {
        // a huge rate wrecks the model after the first epochs
        let mut net = Network::new(1024, &[4], &[0, 1], Activation::Tanh, &mut RngStream::new(5));
        let cfg = TrainConfig { learning_rate: 40.0, epochs: 6, ..TrainConfig::default() };
        let valid = halves(20, 3);
        match finetune(&mut net, &halves(40, 1), &valid, &cfg) {
            Ok(r) => {
                let best = r.valid_errors.iter().cloned().fold(f64::INFINITY, f64::min);
                assert_eq!(r.best_valid_error(), Some(best));
                assert_eq!(evaluate(&net, &valid, None).unwrap(), best);
            }
            Err(e) => assert!(matches!(e, NnetError::Divergence { .. })),
        }
    }

    #[test]
    fn training_is_deterministic() {
        let run = || {
            let mut m = MlpModel::new(1024, 4, &[0, 1], &mut RngStream::new(0));
            let cfg = TrainConfig { epochs: 2, seed: 9, ..TrainConfig::default() };
            finetune(&mut m, &halves(40, 1), &halves(10, 2), &cfg).unwrap();
            m
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn unknown_labels_are_rejected() {
        let mut m = MlpModel::new(1024, 4, &[0, 1], &mut RngStream::new(0));
        let ds = LabeledDataset::new(vec![Sample { image: GreyImage::zeros(), label: 5 }]).unwrap();
        let err = finetune(&mut m, &ds, &ds, &TrainConfig::default());
        assert_eq!(err, Err(NnetError::Label(5)));
    }
}
