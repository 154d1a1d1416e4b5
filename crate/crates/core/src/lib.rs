//! Deterministic generator of perturbed 32×32 character images, plus the
//! small neural models used to study how such out-of-distribution training
//! data affects shallow and deep learners.
//!
//! The crate is `no_std` (it needs `alloc`). Everything random flows
//! through [`rng::RngStream`], so a `(seed, index)` pair fully determines
//! each generated example. File formats, the experiment grid and the CLI
//! live in the `glyphwarp` companion crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub(crate) mod math;

pub mod dataset;
pub mod glyphs;
pub mod imgcore;
pub mod metrics;
pub mod nnet;
pub mod pipeline;
pub mod rng;
pub mod transforms;

pub use dataset::{ClassSet, LabeledDataset, Sample, Split};
pub use imgcore::GreyImage;
pub use rng::RngStream;
