//! Dataset generation across threads. Item `i` depends only on the seed and
//! `i`, so the thread count never changes the output.

use glyphwarp_core::pipeline::{Generator, Pipeline, PipelineError, PipelineSpec, SourceMix, SourceRegistry};
use glyphwarp_core::LabeledDataset;
use rayon::prelude::*;

pub fn generate_parallel(gen: &Generator, n: usize) -> LabeledDataset {
    let items = (0..n as u64).into_par_iter().map(|i| gen.item(i).sample).collect();
    let mut ds = LabeledDataset::new(items).expect("sources emit labels below 62");
    ds.meta = gen.meta(n);
    ds
}

/// Standard sources, generated in parallel.
pub fn generate(n: usize, mix: &SourceMix, spec: &PipelineSpec, seed: u64) -> Result<LabeledDataset, PipelineError> {
    let gen = Generator::new(Pipeline::new(), &SourceRegistry::standard(), mix, spec, seed)?;
    Ok(generate_parallel(&gen, n))
}
