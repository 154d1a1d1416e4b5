//! Backprop against central differences. The numeric side recomputes each
//! loss from the raw weights, not through the code under test.

use glyphwarp_core::nnet::{Activation, DaGradients, DenoisingAutoencoderLayer, Network};
use glyphwarp_core::RngStream;

pub const EPS: f64 = 1e-4;
pub const MAX_RELATIVE_ERROR: f64 = 1e-4;

fn relative(numeric: f64, analytic: f64) -> f64 {
    (numeric - analytic).abs() / (numeric.abs() + analytic.abs()).max(1e-8)
}

fn sigmoid(a: f64) -> f64 {
    1.0 / (1.0 + (-a).exp())
}

fn mlp_nll(net: &Network, x: &[f64], target: usize) -> f64 {
    let mut h: Vec<f64> = x.to_vec();
    for layer in &net.hidden {
        h = (0..layer.outputs)
            .map(|j| {
                let a = layer.b[j] + (0..layer.inputs).map(|i| layer.w[j * layer.inputs + i] * h[i]).sum::<f64>();
                match net.activation {
                    Activation::Tanh => a.tanh(),
                    Activation::Sigmoid => sigmoid(a),
                }
            })
            .collect();
    }
    let top = &net.top;
    let logits: Vec<f64> =
        (0..top.outputs).map(|j| top.b[j] + (0..top.inputs).map(|i| top.w[j * top.inputs + i] * h[i]).sum::<f64>()).collect();
    let norm = logits.iter().map(|l| l.exp()).sum::<f64>().ln();
    norm - logits[target]
}

/// Worst relative error over every parameter of an `inputs`/`widths`/3
/// network.
pub fn mlp_worst(widths: &[usize], activation: Activation, seed: u64) -> f64 {
    let mut rng = RngStream::new(seed);
    let mut net = Network::new(8, widths, &[0, 1, 2], activation, &mut rng);
    for layer in net.layers_mut() {
        for b in layer.b.iter_mut() {
            *b = rng.uniform(-0.5, 0.5);
        }
    }
    let x: Vec<f64> = (0..8).map(|_| rng.unit()).collect();
    let target = 1;
    let mut grad = net.zeros_like();
    net.nll_backprop(&x, target, &mut grad);

    let analytic: Vec<f64> = grad.layers().flat_map(|l| l.w.iter().chain(&l.b).copied().collect::<Vec<_>>()).collect();
    let mut worst: f64 = 0.0;
    let mut k = 0;
    let layer_count = net.layers().count();
    for li in 0..layer_count {
        let size = {
            let l = net.layers().nth(li).unwrap();
            l.w.len() + l.b.len()
        };
        for p in 0..size {
            let nudge = |net: &mut Network, d: f64| {
                let l = net.layers_mut().nth(li).unwrap();
                let nw = l.w.len();
                if p < nw {
                    l.w[p] += d;
                } else {
                    l.b[p - nw] += d;
                }
            };
            let (mut plus, mut minus) = (net.clone(), net.clone());
            nudge(&mut plus, EPS);
            nudge(&mut minus, -EPS);
            let numeric = (mlp_nll(&plus, &x, target) - mlp_nll(&minus, &x, target)) / (2.0 * EPS);
            worst = worst.max(relative(numeric, analytic[k]));
            k += 1;
        }
    }
    worst
}

fn da_loss(l: &DenoisingAutoencoderLayer, x: &[f64], mask: &[usize]) -> f64 {
    let (d, c) = (l.encoder.inputs, l.encoder.outputs);
    let mut xt = x.to_vec();
    for &i in mask {
        xt[i] = 0.0;
    }
    let y: Vec<f64> =
        (0..c).map(|j| sigmoid(l.encoder.b[j] + (0..d).map(|i| l.encoder.w[j * d + i] * xt[i]).sum::<f64>())).collect();
    (0..d)
        .map(|i| {
            let a = l.b_prime[i]
                + (0..c)
                    .map(|j| match &l.w_prime {
                        Some(w) => w[i * c + j],
                        None => l.encoder.w[j * d + i],
                    } * y[j])
                    .sum::<f64>();
            let z = sigmoid(a);
            -(x[i] * z.ln() + (1.0 - x[i]) * (1.0 - z).ln())
        })
        .sum()
}

/// Worst relative error over `W`, `b`, `b′` (and `W′` when untied) of an
/// 8-input, 6-code layer.
pub fn da_worst(untied: bool, seed: u64) -> f64 {
    let mut rng = RngStream::new(seed);
    let mut l = DenoisingAutoencoderLayer::new(8, 6, 0.25, untied, &mut rng);
    for v in l.encoder.b.iter_mut().chain(l.b_prime.iter_mut()) {
        *v = rng.uniform(-0.5, 0.5);
    }
    let x: Vec<f64> = (0..8).map(|_| rng.unit()).collect();
    let (_, mask) = l.corrupt(&x, &mut rng);
    let mut g = DaGradients::zeros(&l);
    l.loss_with_mask(&x, &mask, &mut g);

    let mut worst: f64 = 0.0;
    let mut check = |get: &dyn Fn(&mut DenoisingAutoencoderLayer) -> &mut f64, analytic: f64| {
        let (mut plus, mut minus) = (l.clone(), l.clone());
        *get(&mut plus) += EPS;
        *get(&mut minus) -= EPS;
        let numeric = (da_loss(&plus, &x, &mask) - da_loss(&minus, &x, &mask)) / (2.0 * EPS);
        worst = worst.max(relative(numeric, analytic));
    };
    for k in 0..g.w.len() {
        check(&|l| &mut l.encoder.w[k], g.w[k]);
    }
    for k in 0..g.b.len() {
        check(&|l| &mut l.encoder.b[k], g.b[k]);
    }
    for k in 0..g.b_prime.len() {
        check(&|l| &mut l.b_prime[k], g.b_prime[k]);
    }
    if let Some(wp) = &g.w_prime {
        for (k, &a) in wp.iter().enumerate() {
            check(&|l| &mut l.w_prime.as_mut().unwrap()[k], a);
        }
    }
    worst
}
