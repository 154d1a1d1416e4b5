//! Feed-forward classifiers, denoising autoencoders and their training.
//!
//! Everything computes in `f64` and runs serially, so a seed fixes the
//! final parameters bit for bit.

mod da;
mod train;

use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::{ClassSet, LabeledDataset, CLASS_COUNT};
use crate::math;
use crate::rng::RngStream;

pub use da::{cross_entropy, pretrain, DaGradients, DenoisingAutoencoderLayer, SdaModel, SdaPhase};
pub use train::{finetune, prepare, TrainConfig, TrainReport, LEARNING_RATES};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum NnetError {
    #[error("expected an input of length {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("training diverged (non-finite loss) in epoch {epoch}")]
    Divergence { epoch: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("label {0} has no output unit")]
    Label(u8),
    #[error("invalid configuration: {0}")]
    Config(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    Sigmoid,
}

impl Activation {
    pub fn apply(self, a: f64) -> f64 {
        match self {
            Activation::Tanh => math::tanh(a),
            Activation::Sigmoid => math::sigmoid(a),
        }
    }

    /// Derivative expressed through the output value.
    pub fn slope(self, out: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - out * out,
            Activation::Sigmoid => out * (1.0 - out),
        }
    }
}

/// Affine map with an `outputs × inputs` row-major weight matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

impl Dense {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Dense { inputs, outputs, w: vec![0.0; inputs * outputs], b: vec![0.0; outputs] }
    }

    /// Weights uniform in `±sqrt(6 / (inputs + outputs))`, zero biases.
    pub fn glorot(inputs: usize, outputs: usize, rng: &mut RngStream) -> Self {
        let bound = math::sqrt(6.0 / (inputs + outputs) as f64);
        let w = (0..inputs * outputs).map(|_| rng.uniform(-bound, bound)).collect();
        Dense { inputs, outputs, w, b: vec![0.0; outputs] }
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.w[j * self.inputs..(j + 1) * self.inputs]
    }

    /// `W x + b`.
    pub fn affine(&self, x: &[f64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.b[j] + dot(self.row(j), x);
        }
    }

    /// `out += Wᵀ d`.
    pub fn back(&self, d: &[f64], out: &mut [f64]) {
        for (j, &dj) in d.iter().enumerate() {
            if dj != 0.0 {
                axpy(dj, self.row(j), out);
            }
        }
    }

    /// Accumulates `d ⊗ x` into the weights and `d` into the biases.
    pub fn accumulate(&mut self, d: &[f64], x: &[f64]) {
        let n = self.inputs;
        for (j, &dj) in d.iter().enumerate() {
            self.b[j] += dj;
            if dj != 0.0 {
                axpy(dj, x, &mut self.w[j * n..(j + 1) * n]);
            }
        }
    }

    /// `self += scale · other`.
    pub fn add_scaled(&mut self, other: &Dense, scale: f64) {
        axpy(scale, &other.w, &mut self.w);
        axpy(scale, &other.b, &mut self.b);
    }

    pub fn clear(&mut self) {
        self.w.iter_mut().for_each(|v| *v = 0.0);
        self.b.iter_mut().for_each(|v| *v = 0.0);
    }

    pub fn is_finite(&self) -> bool {
        self.w.iter().chain(&self.b).all(|v| v.is_finite())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four accumulators let the loop vectorize without reassociation
    let mut acc = [0.0; 4];
    let (ca, ra) = a.split_at(a.len() / 4 * 4);
    let (cb, rb) = b.split_at(ca.len());
    for (x, y) in ca.chunks_exact(4).zip(cb.chunks_exact(4)) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    let tail: f64 = ra.iter().zip(rb).map(|(x, y)| x * y).sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = logits.iter().map(|&l| math::exp(l - max)).collect();
    let sum: f64 = out.iter().sum();
    out.iter_mut().for_each(|p| *p /= sum);
    out
}

/// Hidden layers with a shared activation, then a softmax layer whose
/// output `k` stands for class label `labels[k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    pub hidden: Vec<Dense>,
    pub activation: Activation,
    pub top: Dense,
    pub labels: Vec<u8>,
}

impl Network {
    /// Glorot-initialized network; an empty `widths` gives plain softmax
    /// regression.
    pub fn new(inputs: usize, widths: &[usize], labels: &[u8], activation: Activation, rng: &mut RngStream) -> Self {
        let mut hidden = Vec::new();
        let mut fan_in = inputs;
        for &w in widths {
            hidden.push(Dense::glorot(fan_in, w, rng));
            fan_in = w;
        }
        let top = Dense::glorot(fan_in, labels.len(), rng);
        Network { hidden, activation, top, labels: labels.to_vec() }
    }

    pub fn inputs(&self) -> usize {
        self.hidden.first().unwrap_or(&self.top).inputs
    }

    pub fn widths(&self) -> Vec<usize> {
        self.hidden.iter().map(|d| d.outputs).collect()
    }

    pub fn output_of(&self, label: u8) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    /// Same shape, all zeros; used as a gradient accumulator.
    pub fn zeros_like(&self) -> Network {
        Network {
            hidden: self.hidden.iter().map(|d| Dense::zeros(d.inputs, d.outputs)).collect(),
            activation: self.activation,
            top: Dense::zeros(self.top.inputs, self.top.outputs),
            labels: self.labels.clone(),
        }
    }

    pub fn layers(&self) -> impl Iterator<Item = &Dense> {
        self.hidden.iter().chain(core::iter::once(&self.top))
    }

    pub fn layers_mut(&mut self) -> impl Iterator<Item = &mut Dense> {
        self.hidden.iter_mut().chain(core::iter::once(&mut self.top))
    }

    pub fn param_count(&self) -> usize {
        self.layers().map(|d| d.w.len() + d.b.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.layers().all(Dense::is_finite)
    }

    fn check(&self, x: &[f64]) -> Result<(), NnetError> {
        if x.len() != self.inputs() {
            return Err(NnetError::Dimension { expected: self.inputs(), got: x.len() });
        }
        Ok(())
    }

    /// Hidden activations for every layer, the input first.
    fn activations(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = Vec::with_capacity(self.hidden.len() + 1);
        acts.push(x.to_vec());
        for layer in &self.hidden {
            let mut h = vec![0.0; layer.outputs];
            layer.affine(acts.last().expect("input pushed"), &mut h);
            h.iter_mut().for_each(|v| *v = self.activation.apply(*v));
            acts.push(h);
        }
        acts
    }

    pub fn logits(&self, x: &[f64]) -> Result<Vec<f64>, NnetError> {
        self.check(x)?;
        let acts = self.activations(x);
        let mut out = vec![0.0; self.top.outputs];
        self.top.affine(acts.last().expect("input pushed"), &mut out);
        Ok(out)
    }

    /// Class distribution over `labels`.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, NnetError> {
        Ok(softmax(&self.logits(x)?))
    }

    /// Deterministic code of hidden layer `k` (0-based) for input `x`.
    pub fn code(&self, x: &[f64], k: usize) -> Vec<f64> {
        self.activations(x).swap_remove(k + 1)
    }

    /// Negative log-likelihood of output `target`; adds its gradient into
    /// `grad`.
    pub fn nll_backprop(&self, x: &[f64], target: usize, grad: &mut Network) -> f64 {
        let acts = self.activations(x);
        let top_in = acts.last().expect("input pushed");
        let mut logits = vec![0.0; self.top.outputs];
        self.top.affine(top_in, &mut logits);
        let mut delta = softmax(&logits);
        let p = delta[target];
        delta[target] -= 1.0;
        // log-sum-exp form stays finite when p underflows
        let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + math::ln(logits.iter().map(|&l| math::exp(l - max)).sum());
        let loss = if p > 0.0 { -math::ln(p) } else { lse - logits[target] };

        grad.top.accumulate(&delta, top_in);
        let mut upper = &self.top;
        for k in (0..self.hidden.len()).rev() {
            let mut d = vec![0.0; upper.inputs];
            upper.back(&delta, &mut d);
            for (dj, &hj) in d.iter_mut().zip(&acts[k + 1]) {
                *dj *= self.activation.slope(hj);
            }
            grad.hidden[k].accumulate(&d, &acts[k]);
            delta = d;
            upper = &self.hidden[k];
        }
        loss
    }

    /// `self += scale · grad`.
    pub fn add_scaled(&mut self, grad: &Network, scale: f64) {
        for (p, g) in self.layers_mut().zip(grad.layers()) {
            p.add_scaled(g, scale);
        }
    }

    pub fn clear(&mut self) {
        self.layers_mut().for_each(Dense::clear);
    }

    /// Output with the highest probability among `allowed`, lowest index
    /// on ties.
    pub fn predict_among(&self, x: &[f64], allowed: &[usize]) -> Result<usize, NnetError> {
        let logits = self.logits(x)?;
        let mut best = *allowed.first().ok_or(NnetError::Config("no candidate outputs"))?;
        for &k in allowed {
            if logits[k] > logits[best] {
                best = k;
            }
        }
        Ok(best)
    }
}

/// Anything wrapping a softmax [`Network`].
pub trait Classifier {
    fn network(&self) -> &Network;
    fn network_mut(&mut self) -> &mut Network;
}

impl Classifier for Network {
    fn network(&self) -> &Network {
        self
    }

    fn network_mut(&mut self) -> &mut Network {
        self
    }
}

/// One tanh hidden layer and a softmax output.
#[derive(Clone, Debug, PartialEq)]
pub struct MlpModel {
    pub net: Network,
}

impl MlpModel {
    pub fn new(inputs: usize, hidden_units: usize, labels: &[u8], rng: &mut RngStream) -> Self {
        MlpModel { net: Network::new(inputs, &[hidden_units], labels, Activation::Tanh, rng) }
    }

    /// 1024 inputs, all 62 classes.
    pub fn for_images(hidden_units: usize, seed: u64) -> Self {
        let labels: Vec<u8> = (0..CLASS_COUNT as u8).collect();
        Self::new(crate::imgcore::PIXELS, hidden_units, &labels, &mut RngStream::new(seed))
    }

    pub fn hidden_units(&self) -> usize {
        self.net.hidden[0].outputs
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, NnetError> {
        self.net.forward(x)
    }
}

impl Classifier for MlpModel {
    fn network(&self) -> &Network {
        &self.net
    }

    fn network_mut(&mut self) -> &mut Network {
        &mut self.net
    }
}

/// Misclassified count over a dataset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tally {
    pub errors: usize,
    pub total: usize,
}

impl Tally {
    pub fn rate(self) -> f64 {
        self.errors as f64 / self.total as f64
    }
}

/// Counts errors; with a subset, only outputs for labels in it compete and
/// only samples labeled in it are scored. Samples whose label has no
/// output always count as errors.
pub fn evaluate_tally(model: &impl Classifier, ds: &LabeledDataset, subset: Option<ClassSet>) -> Result<Tally, NnetError> {
    let net = model.network();
    let allowed: Vec<usize> = (0..net.labels.len())
        .filter(|&k| subset.map_or(true, |s| s.contains(net.labels[k])))
        .collect();
    let mut tally = Tally { errors: 0, total: 0 };
    let mut x = vec![0.0; crate::imgcore::PIXELS];
    for s in &ds.items {
        if subset.is_some_and(|c| !c.contains(s.label)) {
            continue;
        }
        for (xi, &p) in x.iter_mut().zip(s.image.pixels()) {
            *xi = p as f64;
        }
        let pred = net.predict_among(&x, &allowed)?;
        tally.total += 1;
        if net.labels[pred] != s.label {
            tally.errors += 1;
        }
    }
    if tally.total == 0 {
        return Err(NnetError::EmptyDataset);
    }
    Ok(tally)
}

/// Error rate; see [`evaluate_tally`].
pub fn evaluate(model: &impl Classifier, ds: &LabeledDataset, subset: Option<ClassSet>) -> Result<f64, NnetError> {
    evaluate_tally(model, ds, subset).map(Tally::rate)
}
