use alloc::vec;
use alloc::vec::Vec;

use super::{axpy, dot, Activation, Classifier, Dense, Network, NnetError, TrainConfig};
use crate::dataset::CLASS_COUNT;
use crate::imgcore::{GreyImage, PIXELS};
use crate::math;
use crate::rng::RngStream;

/// `L_H(x, z) = −Σ x log z + (1 − x) log(1 − z)`.
pub fn cross_entropy(x: &[f64], z: &[f64]) -> f64 {
    x.iter()
        .zip(z)
        .map(|(&xi, &zi)| {
            let a = if xi > 0.0 { xi * math::ln(zi) } else { 0.0 };
            let b = if xi < 1.0 { (1.0 - xi) * math::ln(1.0 - zi) } else { 0.0 };
            -(a + b)
        })
        .sum()
}

/// One denoising autoencoder: sigmoid encoder `y = s(W x̃ + b)` and
/// sigmoid decoder `z = s(W' y + b')`, with `W' = Wᵀ` unless `w_prime`
/// holds separate decoder weights (`inputs × code`).
#[derive(Clone, Debug, PartialEq)]
pub struct DenoisingAutoencoderLayer {
    pub encoder: Dense,
    pub b_prime: Vec<f64>,
    pub w_prime: Option<Vec<f64>>,
    pub corruption: f64,
}

/// Gradients of [`DenoisingAutoencoderLayer::loss_with_mask`].
#[derive(Clone, Debug, PartialEq)]
pub struct DaGradients {
    pub w: Vec<f64>,
    pub b: Vec<f64>,
    pub b_prime: Vec<f64>,
    pub w_prime: Option<Vec<f64>>,
}

impl DaGradients {
    pub fn zeros(layer: &DenoisingAutoencoderLayer) -> Self {
        DaGradients {
            w: vec![0.0; layer.encoder.w.len()],
            b: vec![0.0; layer.encoder.outputs],
            b_prime: vec![0.0; layer.encoder.inputs],
            w_prime: layer.w_prime.as_ref().map(|w| vec![0.0; w.len()]),
        }
    }

    fn clear(&mut self) {
        for v in [&mut self.w, &mut self.b, &mut self.b_prime].into_iter().chain(self.w_prime.as_mut()) {
            v.iter_mut().for_each(|g| *g = 0.0);
        }
    }
}

impl DenoisingAutoencoderLayer {
    pub fn new(inputs: usize, code: usize, corruption: f64, untied: bool, rng: &mut RngStream) -> Self {
        let encoder = Dense::glorot(inputs, code, rng);
        let w_prime = untied.then(|| Dense::glorot(code, inputs, rng).w);
        DenoisingAutoencoderLayer { encoder, b_prime: vec![0.0; inputs], w_prime, corruption }
    }

    pub fn inputs(&self) -> usize {
        self.encoder.inputs
    }

    pub fn code_size(&self) -> usize {
        self.encoder.outputs
    }

    /// Number of inputs zeroed per example.
    pub fn masked_count(&self) -> usize {
        math::round(self.corruption * self.inputs() as f64) as usize
    }

    /// Zeroes exactly [`masked_count`](Self::masked_count) coordinates and
    /// returns their indices.
    pub fn corrupt(&self, x: &[f64], rng: &mut RngStream) -> (Vec<f64>, Vec<usize>) {
        let mask = rng.choose_distinct(self.inputs(), self.masked_count());
        let mut tilde = x.to_vec();
        for &i in &mask {
            tilde[i] = 0.0;
        }
        (tilde, mask)
    }

    pub fn encode(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.code_size()];
        self.encoder.affine(x, &mut y);
        y.iter_mut().for_each(|v| *v = math::sigmoid(*v));
        y
    }

    /// Decoder pre-activations.
    fn decode_pre(&self, y: &[f64]) -> Vec<f64> {
        let mut a = self.b_prime.clone();
        match &self.w_prime {
            Some(wp) => {
                let code = self.code_size();
                for (i, ai) in a.iter_mut().enumerate() {
                    *ai += dot(&wp[i * code..(i + 1) * code], y);
                }
            }
            None => self.encoder.back(y, &mut a),
        }
        a
    }

    pub fn decode(&self, y: &[f64]) -> Vec<f64> {
        self.decode_pre(y).into_iter().map(math::sigmoid).collect()
    }

    /// Cross-entropy of the uncorrupted reconstruction.
    pub fn reconstruction_loss(&self, x: &[f64]) -> f64 {
        let a = self.decode_pre(&self.encode(x));
        stable_ce(x, &a)
    }

    /// Loss and gradients with a random mask.
    pub fn loss(&self, x: &[f64], rng: &mut RngStream) -> Result<(f64, DaGradients), NnetError> {
        let (_, mask) = self.corrupt(x, rng);
        let mut g = DaGradients::zeros(self);
        let loss = self.loss_with_mask(x, &mask, &mut g);
        if loss.is_finite() {
            Ok((loss, g))
        } else {
            Err(NnetError::Divergence { epoch: 0 })
        }
    }

    /// Loss for a given mask; adds the gradients into `g`.
    pub fn loss_with_mask(&self, x: &[f64], mask: &[usize], g: &mut DaGradients) -> f64 {
        let mut tilde = x.to_vec();
        for &i in mask {
            tilde[i] = 0.0;
        }
        let y = self.encode(&tilde);
        let a = self.decode_pre(&y);
        let loss = stable_ce(x, &a);
        // dL/da = z − x
        let dz: Vec<f64> = a.iter().zip(x).map(|(&ai, &xi)| math::sigmoid(ai) - xi).collect();
        axpy(1.0, &dz, &mut g.b_prime);

        let inputs = self.inputs();
        let code = self.code_size();
        let mut dy = vec![0.0; code];
        match (&self.w_prime, &mut g.w_prime) {
            (Some(wp), Some(gwp)) => {
                for i in 0..inputs {
                    axpy(dz[i], &y, &mut gwp[i * code..(i + 1) * code]);
                    axpy(dz[i], &wp[i * code..(i + 1) * code], &mut dy);
                }
            }
            _ => {
                for j in 0..code {
                    dy[j] = dot(self.encoder.row(j), &dz);
                    axpy(y[j], &dz, &mut g.w[j * inputs..(j + 1) * inputs]);
                }
            }
        }
        for j in 0..code {
            let d = dy[j] * y[j] * (1.0 - y[j]);
            g.b[j] += d;
            if d != 0.0 {
                axpy(d, &tilde, &mut g.w[j * inputs..(j + 1) * inputs]);
            }
        }
        loss
    }

    fn step(&mut self, g: &DaGradients, scale: f64) {
        axpy(scale, &g.w, &mut self.encoder.w);
        axpy(scale, &g.b, &mut self.encoder.b);
        axpy(scale, &g.b_prime, &mut self.b_prime);
        if let (Some(w), Some(gw)) = (self.w_prime.as_mut(), g.w_prime.as_ref()) {
            axpy(scale, gw, w);
        }
    }
}

/// `Σ softplus(a) − x·a`, the cross-entropy against `z = s(a)` without
/// evaluating `log z`.
fn stable_ce(x: &[f64], a: &[f64]) -> f64 {
    x.iter().zip(a).map(|(&xi, &ai)| math::softplus(ai) - xi * ai).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdaPhase {
    Pretraining,
    Finetuning,
}

/// Three equal-width denoising autoencoders and a softmax layer. The
/// encoders live in `net.hidden`; only the reconstruction biases (and
/// untied decoders) are kept alongside.
#[derive(Clone, Debug, PartialEq)]
pub struct SdaModel {
    pub net: Network,
    pub b_prime: Vec<Vec<f64>>,
    pub w_prime: Vec<Option<Vec<f64>>>,
    pub corruption: f64,
    pub phase: SdaPhase,
}

/// Hidden layer count of every stacked model.
pub const SDA_DEPTH: usize = 3;

impl SdaModel {
    pub fn new(inputs: usize, width: usize, labels: &[u8], corruption: f64, untied: bool, rng: &mut RngStream) -> Self {
        let net = Network::new(inputs, &[width; SDA_DEPTH], labels, Activation::Sigmoid, rng);
        let b_prime = net.hidden.iter().map(|d| vec![0.0; d.inputs]).collect();
        let w_prime = net
            .hidden
            .iter()
            .map(|d| untied.then(|| Dense::glorot(d.outputs, d.inputs, rng).w))
            .collect();
        SdaModel { net, b_prime, w_prime, corruption, phase: SdaPhase::Pretraining }
    }

    /// 1024 inputs, all 62 classes.
    pub fn for_images(width: usize, corruption: f64, seed: u64) -> Self {
        let labels: Vec<u8> = (0..CLASS_COUNT as u8).collect();
        Self::new(PIXELS, width, &labels, corruption, false, &mut RngStream::new(seed))
    }

    pub fn width(&self) -> usize {
        self.net.hidden[0].outputs
    }

    pub fn layer(&self, k: usize) -> DenoisingAutoencoderLayer {
        DenoisingAutoencoderLayer {
            encoder: self.net.hidden[k].clone(),
            b_prime: self.b_prime[k].clone(),
            w_prime: self.w_prime[k].clone(),
            corruption: self.corruption,
        }
    }

    pub fn set_layer(&mut self, k: usize, layer: DenoisingAutoencoderLayer) {
        self.net.hidden[k] = layer.encoder;
        self.b_prime[k] = layer.b_prime;
        self.w_prime[k] = layer.w_prime;
    }
}

impl Classifier for SdaModel {
    fn network(&self) -> &Network {
        &self.net
    }

    fn network_mut(&mut self) -> &mut Network {
        self.phase = SdaPhase::Finetuning;
        &mut self.net
    }
}

/// Greedy layer-wise pretraining on images alone. Layer `k` trains on the
/// uncorrupted codes of layers `0..k`. Returns the mean per-example loss
/// of every epoch, per layer.
pub fn pretrain(sda: &mut SdaModel, images: &[GreyImage], cfg: &TrainConfig) -> Result<Vec<Vec<f64>>, NnetError> {
    cfg.validate()?;
    if images.is_empty() {
        return Err(NnetError::EmptyDataset);
    }
    let rng = RngStream::new(cfg.seed).substream(1);
    let mut inputs: Vec<Vec<f64>> = images.iter().map(GreyImage::to_f64_vec).collect();
    let mut history = Vec::with_capacity(SDA_DEPTH);
    for k in 0..SDA_DEPTH {
        let mut layer = sda.layer(k);
        let mut r = rng.substream(k as u64);
        let mut g = DaGradients::zeros(&layer);
        let mut order: Vec<usize> = (0..inputs.len()).collect();
        let mut losses = Vec::with_capacity(cfg.pretrain_epochs);
        for epoch in 0..cfg.pretrain_epochs {
            r.shuffle(&mut order);
            let mut total = 0.0;
            for batch in order.chunks(cfg.minibatch) {
                g.clear();
                for &i in batch {
                    let mask = r.choose_distinct(layer.inputs(), layer.masked_count());
                    total += layer.loss_with_mask(&inputs[i], &mask, &mut g);
                }
                layer.step(&g, -cfg.pretrain_learning_rate / batch.len() as f64);
            }
            let mean = total / inputs.len() as f64;
            if !mean.is_finite() {
                return Err(NnetError::Divergence { epoch });
            }
            losses.push(mean);
        }
        if k + 1 < SDA_DEPTH {
            inputs = inputs.iter().map(|x| layer.encode(x)).collect();
        }
        sda.set_layer(k, layer);
        history.push(losses);
    }
    Ok(history)
}
