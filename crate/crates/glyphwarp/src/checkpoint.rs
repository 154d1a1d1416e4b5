//! CNM1 model checkpoints.
//!
//! ```text
//! "CNM1"                      magic
//! u8      kind                0 = MLP (tanh), 1 = SDA (sigmoid)
//! u8      flags               bit 0: SDA decoders are untied
//! u16     reserved            zero
//! u32     inputs
//! u32     hidden layer count  L
//! u32 × L hidden widths
//! u32     class count         C
//! u8 × C  class map           label of output j
//! f32     corruption fraction (0 for MLP)
//! u64     parameter count
//! f32 ×   parameters
//! ```
//!
//! Parameters run layer by layer from the input: `W` (row-major, outputs ×
//! inputs) then `b`; SDA layers follow with `b′` and, when untied, `W′`
//! (inputs × code). The softmax layer comes last. All integers and floats
//! are little-endian. Weights are kept as `f64` in memory, so a loaded model
//! equals the saved one up to `f32` rounding.

use std::fs;
use std::io;
use std::path::Path;

use glyphwarp_core::nnet::{Activation, Classifier, Dense, MlpModel, Network, SdaModel, SdaPhase};

pub const MAGIC: [u8; 4] = *b"CNM1";

#[derive(Debug, thiserror::Error)]
pub enum CheckpointError {
    #[error("not a CNM1 checkpoint")]
    BadMagic,
    #[error("unknown model kind {0}")]
    Kind(u8),
    #[error("checkpoint truncated")]
    Truncated,
    #[error("checkpoint declares {declared} parameters, architecture needs {needed}")]
    ParamCount { declared: u64, needed: u64 },
    #[error("class map entry {0} is not a label")]
    Label(u8),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Mlp(MlpModel),
    Sda(SdaModel),
}

impl Model {
    pub fn network(&self) -> &Network {
        match self {
            Model::Mlp(m) => m.network(),
            Model::Sda(m) => m.network(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Model::Mlp(_) => "mlp",
            Model::Sda(_) => "sda",
        }
    }
}

impl Classifier for Model {
    fn network(&self) -> &Network {
        Model::network(self)
    }

    fn network_mut(&mut self) -> &mut Network {
        match self {
            Model::Mlp(m) => m.network_mut(),
            Model::Sda(m) => m.network_mut(),
        }
    }
}

fn push_all(out: &mut Vec<f32>, xs: &[f64]) {
    out.extend(xs.iter().map(|&v| v as f32));
}

fn params(model: &Model) -> Vec<f32> {
    let net = model.network();
    let mut out = Vec::new();
    for (k, layer) in net.hidden.iter().enumerate() {
        push_all(&mut out, &layer.w);
        push_all(&mut out, &layer.b);
        if let Model::Sda(sda) = model {
            push_all(&mut out, &sda.b_prime[k]);
            if let Some(w) = &sda.w_prime[k] {
                push_all(&mut out, w);
            }
        }
    }
    push_all(&mut out, &net.top.w);
    push_all(&mut out, &net.top.b);
    out
}

pub fn encode(model: &Model) -> Vec<u8> {
    let net = model.network();
    let (kind, flags, corruption) = match model {
        Model::Mlp(_) => (0u8, 0u8, 0.0),
        Model::Sda(s) => (1, s.w_prime.iter().any(Option::is_some) as u8, s.corruption as f32),
    };
    let mut out = MAGIC.to_vec();
    out.extend([kind, flags, 0, 0]);
    out.extend((net.inputs() as u32).to_le_bytes());
    out.extend((net.hidden.len() as u32).to_le_bytes());
    for w in net.widths() {
        out.extend((w as u32).to_le_bytes());
    }
    out.extend((net.labels.len() as u32).to_le_bytes());
    out.extend(&net.labels);
    out.extend(corruption.to_le_bytes());
    let p = params(model);
    out.extend((p.len() as u64).to_le_bytes());
    for v in p {
        out.extend(v.to_le_bytes());
    }
    out
}

struct Cursor<'a>(&'a [u8]);

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CheckpointError> {
        if self.0.len() < n {
            return Err(CheckpointError::Truncated);
        }
        let (head, rest) = self.0.split_at(n);
        self.0 = rest;
        Ok(head)
    }

    fn u32(&mut self) -> Result<usize, CheckpointError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()) as usize)
    }

    fn f32(&mut self) -> Result<f32, CheckpointError> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn floats(&mut self, n: usize) -> Result<Vec<f64>, CheckpointError> {
        let bytes = self.take(n.checked_mul(4).ok_or(CheckpointError::Truncated)?)?;
        Ok(bytes.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64).collect())
    }

    fn dense(&mut self, inputs: usize, outputs: usize) -> Result<Dense, CheckpointError> {
        let w = self.floats(inputs * outputs)?;
        let b = self.floats(outputs)?;
        Ok(Dense { inputs, outputs, w, b })
    }
}

pub fn decode(bytes: &[u8]) -> Result<Model, CheckpointError> {
    let mut c = Cursor(bytes);
    if c.take(4).map_err(|_| CheckpointError::BadMagic)? != MAGIC {
        return Err(CheckpointError::BadMagic);
    }
    let head = c.take(4)?;
    let (kind, untied) = (head[0], head[1] & 1 == 1);
    if kind > 1 {
        return Err(CheckpointError::Kind(kind));
    }
    let inputs = c.u32()?;
    let depth = c.u32()?;
    let widths = (0..depth).map(|_| c.u32()).collect::<Result<Vec<_>, _>>()?;
    let classes = c.u32()?;
    let labels = c.take(classes)?.to_vec();
    if let Some(&bad) = labels.iter().find(|&&l| l >= 62) {
        return Err(CheckpointError::Label(bad));
    }
    let corruption = c.f32()? as f64;
    let declared = u64::from_le_bytes(c.take(8)?.try_into().unwrap());

    let mut needed = 0u64;
    let mut fan_in = inputs as u64;
    for &w in &widths {
        needed += fan_in * w as u64 + w as u64;
        if kind == 1 {
            needed += fan_in + if untied { fan_in * w as u64 } else { 0 };
        }
        fan_in = w as u64;
    }
    needed += fan_in * classes as u64 + classes as u64;
    if declared != needed {
        return Err(CheckpointError::ParamCount { declared, needed });
    }

    let mut hidden = Vec::with_capacity(widths.len());
    let (mut b_prime, mut w_prime) = (Vec::new(), Vec::new());
    let mut fan_in = inputs;
    for &w in &widths {
        hidden.push(c.dense(fan_in, w)?);
        if kind == 1 {
            b_prime.push(c.floats(fan_in)?);
            w_prime.push(if untied { Some(c.floats(fan_in * w)?) } else { None });
        }
        fan_in = w;
    }
    let top = c.dense(fan_in, classes)?;
    let activation = if kind == 0 { Activation::Tanh } else { Activation::Sigmoid };
    let net = Network { hidden, activation, top, labels };
    Ok(match kind {
        0 => Model::Mlp(MlpModel { net }),
        _ => Model::Sda(SdaModel { net, b_prime, w_prime, corruption, phase: SdaPhase::Finetuning }),
    })
}

pub fn save(model: &Model, path: &Path) -> Result<(), CheckpointError> {
    fs::write(path, encode(model))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<Model, CheckpointError> {
    decode(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use glyphwarp_core::RngStream;

    fn round_trip(model: Model) {
        let bytes = encode(&model);
        let back = decode(&bytes).unwrap();
        assert_eq!(encode(&back), bytes);
        assert_eq!(back.network().widths(), model.network().widths());
        assert_eq!(back.network().labels, model.network().labels);
        let x: Vec<f64> = (0..model.network().inputs()).map(|i| (i % 5) as f64 / 4.0).collect();
        let (a, b) = (model.network().forward(&x).unwrap(), back.network().forward(&x).unwrap());
        for (p, q) in a.iter().zip(&b) {
            assert!((p - q).abs() < 1e-5);
        }
    }

    #[test]
    fn mlp_round_trips() {
        round_trip(Model::Mlp(MlpModel::new(12, 5, &[0, 3, 61], &mut RngStream::new(1))));
    }

    #[test]
    fn sda_round_trips_tied_and_untied() {
        for untied in [false, true] {
            let mut rng = RngStream::new(2);
            let mut m = SdaModel::new(9, 4, &[10, 11], 0.2, untied, &mut rng);
            m.b_prime[1][2] = 0.25;
            round_trip(Model::Sda(m));
        }
    }

    #[test]
    fn header_fields_sit_at_fixed_offsets() {
        let bytes = encode(&Model::Mlp(MlpModel::new(7, 3, &[4, 5], &mut RngStream::new(1))));
        assert_eq!(&bytes[..4], b"CNM1");
        assert_eq!(bytes[4], 0);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 7);
        assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(bytes[16..20].try_into().unwrap()), 3);
        assert_eq!(u32::from_le_bytes(bytes[20..24].try_into().unwrap()), 2);
        assert_eq!(&bytes[24..26], &[4, 5]);
        assert_eq!(u64::from_le_bytes(bytes[30..38].try_into().unwrap()), 7 * 3 + 3 + 3 * 2 + 2);
        assert_eq!(bytes.len(), 38 + 4 * 32);
    }

    #[test]
    fn damaged_checkpoints_error() {
        let bytes = encode(&Model::Mlp(MlpModel::new(7, 3, &[4, 5], &mut RngStream::new(1))));
        for cut in 0..bytes.len() {
            assert!(decode(&bytes[..cut]).is_err(), "prefix of {cut} bytes decoded");
        }
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert!(matches!(decode(&bad), Err(CheckpointError::Kind(9))));
        let mut bad = bytes.clone();
        bad[30] += 1;
        assert!(matches!(decode(&bad), Err(CheckpointError::ParamCount { .. })));
    }
}
