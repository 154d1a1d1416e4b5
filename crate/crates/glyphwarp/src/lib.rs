//! File formats, parallel generation, the experiment grid and the
//! `glyphwarp` command line, on top of `glyphwarp-core`.

pub mod cds;
pub mod checkpoint;
pub mod config;
pub mod generate;
pub mod harness;
pub mod sheet;

pub use glyphwarp_core as core;
