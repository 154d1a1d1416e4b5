//! Stage composition, the NISTP/P07 presets and multi-source dataset
//! generation.
//!
//! Every stage draws from its own substream of the per-image pipeline
//! stream, indexed by its canonical position. Turning a stage on or off,
//! or skipping it at sampling time, therefore never shifts the randomness
//! seen by any other stage.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::dataset::{LabeledDataset, Sample};
use crate::glyphs::{standin_sources, SyntheticStyle};
use crate::imgcore::GreyImage;
use crate::rng::RngStream;
use crate::transforms::*;

pub use crate::glyphs::{synthetic_source, GlyphSource, SyntheticSource};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error("unknown stage `{0}`")]
    UnknownStage(String),
    #[error("unknown preset `{0}` (expected raw, nistp or p07)")]
    UnknownPreset(String),
    #[error("unknown source `{0}`")]
    UnknownSource(String),
    #[error("source weights sum to {0}, not 1")]
    MixWeights(f64),
    #[error("malformed source mix `{0}`")]
    MixSyntax(String),
    #[error("complexity range [{0}, {1}] is not inside [0, 1]")]
    ComplexityRange(f64, f64),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StageKind {
    Thickness,
    Slant,
    Affine,
    Elastic,
    Pinch,
    MotionBlur,
    Occlusion,
    Smoothing,
    Permute,
    GaussianNoise,
    Background,
    SaltPepper,
    Scratches,
    Contrast,
}

impl StageKind {
    /// Canonical application order.
    pub const ALL: [StageKind; 14] = [
        StageKind::Thickness,
        StageKind::Slant,
        StageKind::Affine,
        StageKind::Elastic,
        StageKind::Pinch,
        StageKind::MotionBlur,
        StageKind::Occlusion,
        StageKind::Smoothing,
        StageKind::Permute,
        StageKind::GaussianNoise,
        StageKind::Background,
        StageKind::SaltPepper,
        StageKind::Scratches,
        StageKind::Contrast,
    ];

    /// The transformation stage: everything up to and including pinch.
    pub const GEOMETRIC: [StageKind; 5] =
        [StageKind::Thickness, StageKind::Slant, StageKind::Affine, StageKind::Elastic, StageKind::Pinch];

    pub fn position(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            StageKind::Thickness => "thickness",
            StageKind::Slant => "slant",
            StageKind::Affine => "affine",
            StageKind::Elastic => "elastic",
            StageKind::Pinch => "pinch",
            StageKind::MotionBlur => "motion_blur",
            StageKind::Occlusion => "occlusion",
            StageKind::Smoothing => "smoothing",
            StageKind::Permute => "permute",
            StageKind::GaussianNoise => "gaussian_noise",
            StageKind::Background => "background",
            StageKind::SaltPepper => "salt_pepper",
            StageKind::Scratches => "scratches",
            StageKind::Contrast => "contrast",
        }
    }
}

impl fmt::Display for StageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StageKind {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().replace('-', "_");
        StageKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| PipelineError::UnknownStage(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    Raw,
    Nistp,
    P07,
    Custom,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Raw => "raw",
            Preset::Nistp => "nistp",
            Preset::P07 => "p07",
            Preset::Custom => "custom",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ComplexityMode {
    Fixed(Complexity),
    /// Each stage draws its own complexity uniformly in `[lo, hi]`, per image.
    PerModuleUniform(f64, f64),
}

/// Upper end of the per-module complexity range of the presets.
pub const PRESET_MAX_COMPLEXITY: f64 = 0.7;

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineSpec {
    stages: Vec<StageKind>,
    preset: Preset,
    complexity: ComplexityMode,
}

impl PipelineSpec {
    pub fn raw() -> Self {
        PipelineSpec {
            stages: Vec::new(),
            preset: Preset::Raw,
            complexity: ComplexityMode::Fixed(Complexity::ZERO),
        }
    }

    pub fn nistp() -> Self {
        PipelineSpec {
            stages: StageKind::GEOMETRIC.to_vec(),
            preset: Preset::Nistp,
            complexity: ComplexityMode::PerModuleUniform(0.0, PRESET_MAX_COMPLEXITY),
        }
    }

    pub fn p07() -> Self {
        PipelineSpec {
            stages: StageKind::ALL.to_vec(),
            preset: Preset::P07,
            complexity: ComplexityMode::PerModuleUniform(0.0, PRESET_MAX_COMPLEXITY),
        }
    }

    /// Any subset of stages, in any order; duplicates are dropped and the
    /// canonical order restored.
    pub fn custom(stages: &[StageKind], complexity: ComplexityMode) -> Result<Self, PipelineError> {
        let mut stages = stages.to_vec();
        stages.sort();
        stages.dedup();
        PipelineSpec { stages, preset: Preset::Custom, complexity: ComplexityMode::Fixed(Complexity::ZERO) }
            .with_complexity(complexity)
    }

    pub fn preset(name: &str) -> Result<Self, PipelineError> {
        match name.trim().to_ascii_lowercase().as_str() {
            "raw" => Ok(Self::raw()),
            "nistp" => Ok(Self::nistp()),
            "p07" => Ok(Self::p07()),
            _ => Err(PipelineError::UnknownPreset(name.to_string())),
        }
    }

    /// Same stages under a different complexity rule. The preset label is
    /// kept.
    pub fn with_complexity(mut self, complexity: ComplexityMode) -> Result<Self, PipelineError> {
        if let ComplexityMode::PerModuleUniform(lo, hi) = complexity {
            if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
                return Err(PipelineError::ComplexityRange(lo, hi));
            }
        }
        self.complexity = complexity;
        Ok(self)
    }

    pub fn stages(&self) -> &[StageKind] {
        &self.stages
    }

    pub fn preset_kind(&self) -> Preset {
        self.preset
    }

    pub fn complexity(&self) -> ComplexityMode {
        self.complexity
    }

    pub fn contains(&self, stage: StageKind) -> bool {
        self.stages.contains(&stage)
    }
}

/// Image after one stage, with the complexity that stage used.
#[derive(Clone, Debug, PartialEq)]
pub struct StageSnapshot {
    pub stage: StageKind,
    pub complexity: Complexity,
    pub image: GreyImage,
}

/// Draws occluders for the occlusion stage.
pub type Occluder<'a> = &'a dyn Fn(&mut RngStream) -> GreyImage;

/// Seed of the fallback occluder source used by [`Pipeline::perturb`].
const OCCLUDER_SEED: u64 = 0x0CC1_0DE5;

/// Holds the fixed image banks; cheap to share across threads.
#[derive(Clone, Debug)]
pub struct Pipeline {
    banks: Arc<Banks>,
    fallback: SyntheticSource,
}

impl Default for Pipeline {
    fn default() -> Self {
        Self::new()
    }
}

impl Pipeline {
    pub fn new() -> Self {
        Pipeline {
            banks: Arc::new(Banks::standard()),
            fallback: SyntheticSource::new(
                "occluder",
                crate::dataset::ClassSet::All,
                SyntheticStyle::handwriting(),
                OCCLUDER_SEED,
            ),
        }
    }

    pub fn banks(&self) -> &Banks {
        &self.banks
    }

    /// Perturbs with occluders drawn from a built-in handwriting source.
    pub fn perturb(&self, img: &GreyImage, spec: &PipelineSpec, rng: &RngStream) -> GreyImage {
        let occluder = |r: &mut RngStream| self.fallback.draw(r).image;
        self.perturb_with(img, spec, rng, &occluder)
    }

    pub fn perturb_with(&self, img: &GreyImage, spec: &PipelineSpec, rng: &RngStream, occluder: Occluder) -> GreyImage {
        let mut out = img.clone();
        for &stage in spec.stages() {
            out = self.run_stage(&out, stage, spec.complexity, rng, occluder).1;
        }
        out
    }

    /// Like [`Pipeline::perturb_with`], also returning the image after every
    /// stage.
    pub fn perturb_with_trace(
        &self,
        img: &GreyImage,
        spec: &PipelineSpec,
        rng: &RngStream,
        occluder: Occluder,
    ) -> Vec<StageSnapshot> {
        let mut trace: Vec<StageSnapshot> = Vec::with_capacity(spec.stages().len());
        for &stage in spec.stages() {
            let input = trace.last().map_or(img, |s| &s.image);
            let (complexity, image) = self.run_stage(input, stage, spec.complexity, rng, occluder);
            trace.push(StageSnapshot { stage, complexity, image });
        }
        trace
    }

    /// Stage streams draw the complexity first (per-module mode only), then
    /// the module parameters.
    fn run_stage(
        &self,
        img: &GreyImage,
        stage: StageKind,
        mode: ComplexityMode,
        rng: &RngStream,
        occluder: Occluder,
    ) -> (Complexity, GreyImage) {
        let mut r = rng.substream(stage.position() as u64);
        let k = match mode {
            ComplexityMode::Fixed(k) => k,
            ComplexityMode::PerModuleUniform(lo, hi) => {
                Complexity::new(r.uniform(lo, hi)).expect("range checked by the spec")
            }
        };
        let out = match stage {
            StageKind::Thickness => apply_thickness(img, &sample_thickness(&mut r, k)),
            StageKind::Slant => apply_slant(img, &sample_slant(&mut r, k)),
            StageKind::Affine => apply_affine(img, &sample_affine(&mut r, k)),
            StageKind::Elastic => apply_elastic(img, &sample_elastic(&mut r, k)),
            StageKind::Pinch => apply_pinch(img, &sample_pinch(&mut r, k)),
            StageKind::MotionBlur => apply_motion_blur(img, &sample_motion_blur(&mut r, k)),
            StageKind::Occlusion => apply_occlusion(img, &sample_occlusion(&mut r, k, occluder)),
            StageKind::Smoothing => apply_smoothing(img, &sample_smoothing(&mut r, k)),
            StageKind::Permute => apply_permute(img, &sample_permute(&mut r, k)),
            StageKind::GaussianNoise => apply_gaussian_noise(img, &sample_gaussian_noise(&mut r, k)),
            StageKind::Background => apply_background(img, &sample_background(&mut r, k, &self.banks)),
            StageKind::SaltPepper => apply_salt_pepper(img, &sample_salt_pepper(&mut r, k)),
            StageKind::Scratches => apply_scratches(img, &sample_scratches(&mut r, k, &self.banks)),
            StageKind::Contrast => apply_contrast(img, &sample_contrast(&mut r, k)),
        };
        (k, out.expect("sampled parameters are valid"))
    }
}

/// Named source weights.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceMix {
    entries: Vec<(String, f64)>,
}

impl SourceMix {
    pub fn new(entries: Vec<(String, f64)>) -> Result<Self, PipelineError> {
        if entries.is_empty() {
            return Err(PipelineError::MixWeights(0.0));
        }
        if let Some((name, _)) = entries.iter().find(|(_, w)| !(w.is_finite() && *w >= 0.0)) {
            return Err(PipelineError::MixSyntax(name.clone()));
        }
        let total: f64 = entries.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(PipelineError::MixWeights(total));
        }
        Ok(SourceMix { entries })
    }

    /// fonts 10 %, captcha 25 %, OCR 25 %, handwriting 40 %.
    pub fn paper() -> Self {
        SourceMix {
            entries: [("fonts", 0.10), ("captcha", 0.25), ("ocr", 0.25), ("nist", 0.40)]
                .into_iter()
                .map(|(n, w)| (n.to_string(), w))
                .collect(),
        }
    }

    pub fn single(name: &str) -> Self {
        SourceMix { entries: alloc::vec![(name.to_string(), 1.0)] }
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }
}

impl fmt::Display for SourceMix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (n, w)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{n}={w}")?;
        }
        Ok(())
    }
}

/// Parses `paper`, a bare source name, or `name=weight,name=weight,…`.
impl FromStr for SourceMix {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "paper" {
            return Ok(Self::paper());
        }
        if !s.contains('=') {
            if s.is_empty() || s.contains(',') {
                return Err(PipelineError::MixSyntax(s.to_string()));
            }
            return Ok(Self::single(s));
        }
        let entries = s
            .split(',')
            .map(|part| {
                let (name, w) = part.split_once('=').ok_or_else(|| PipelineError::MixSyntax(part.to_string()))?;
                let w = w.trim().parse::<f64>().map_err(|_| PipelineError::MixSyntax(part.to_string()))?;
                Ok((name.trim().to_string(), w))
            })
            .collect::<Result<Vec<_>, PipelineError>>()?;
        Self::new(entries)
    }
}

/// Seed fixing the writer populations of the standard sources. It is the
/// same for every dataset so that clean and perturbed sets share writers.
pub const SOURCE_SEED: u64 = 0x5EED_0F_57A4D;

/// Named glyph sources available to [`SourceMix`].
#[derive(Clone)]
pub struct SourceRegistry {
    sources: Vec<Arc<dyn GlyphSource>>,
}

impl fmt::Debug for SourceRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.sources.iter().map(|s| s.name())).finish()
    }
}

impl Default for SourceRegistry {
    fn default() -> Self {
        Self::standard()
    }
}

impl SourceRegistry {
    pub fn empty() -> Self {
        SourceRegistry { sources: Vec::new() }
    }

    /// `fonts`, `captcha`, `ocr` and `nist` stand-ins.
    pub fn standard() -> Self {
        let mut reg = Self::empty();
        for s in standin_sources(SOURCE_SEED) {
            reg.register(Arc::new(s));
        }
        reg
    }

    /// Replaces any source with the same name.
    pub fn register(&mut self, source: Arc<dyn GlyphSource>) {
        self.sources.retain(|s| s.name() != source.name());
        self.sources.push(source);
    }

    pub fn get(&self, name: &str) -> Option<&Arc<dyn GlyphSource>> {
        self.sources.iter().find(|s| s.name() == name)
    }

    pub fn names(&self) -> Vec<&str> {
        self.sources.iter().map(|s| s.name()).collect()
    }
}

/// A mix resolved against a registry: sources with cumulative weights.
#[derive(Clone)]
pub struct ResolvedMix {
    sources: Vec<Arc<dyn GlyphSource>>,
    cumulative: Vec<f64>,
}

impl ResolvedMix {
    pub fn new(mix: &SourceMix, registry: &SourceRegistry) -> Result<Self, PipelineError> {
        let mut sources = Vec::new();
        let mut cumulative = Vec::new();
        let mut acc = 0.0;
        for (name, w) in mix.entries() {
            let src = registry.get(name).ok_or_else(|| PipelineError::UnknownSource(name.clone()))?;
            acc += w;
            sources.push(src.clone());
            cumulative.push(acc);
        }
        Ok(ResolvedMix { sources, cumulative })
    }

    /// Index of the source picked by one unit draw.
    pub fn pick(&self, rng: &mut RngStream) -> usize {
        let u = rng.unit() * self.cumulative.last().copied().unwrap_or(1.0);
        self.cumulative.iter().position(|&c| u < c).unwrap_or(self.sources.len() - 1)
    }

    pub fn source(&self, index: usize) -> &dyn GlyphSource {
        &*self.sources[index]
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }
}

/// Generated item plus the index of the source it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedItem {
    pub sample: Sample,
    pub source: usize,
}

/// Item `i` of a dataset is a pure function of `(seed, i)`.
#[derive(Clone)]
pub struct Generator {
    pipeline: Pipeline,
    mix: ResolvedMix,
    mix_spec: SourceMix,
    spec: PipelineSpec,
    seed: u64,
}

impl Generator {
    pub fn new(
        pipeline: Pipeline,
        registry: &SourceRegistry,
        mix: &SourceMix,
        spec: &PipelineSpec,
        seed: u64,
    ) -> Result<Self, PipelineError> {
        Ok(Generator {
            pipeline,
            mix: ResolvedMix::new(mix, registry)?,
            mix_spec: mix.clone(),
            spec: spec.clone(),
            seed,
        })
    }

    /// Substreams of item `i`: 0 picks the source, 1 draws the glyph, 2
    /// drives the pipeline. Occluders come from the same mix.
    pub fn item(&self, i: u64) -> GeneratedItem {
        let item = RngStream::new(self.seed).substream(i);
        let source = self.source_of(i);
        let glyph = self.mix.source(source).draw(&mut item.substream(1));
        let occluder = |r: &mut RngStream| {
            let k = self.mix.pick(r);
            self.mix.source(k).draw(r).image
        };
        let image = self.pipeline.perturb_with(&glyph.image, &self.spec, &item.substream(2), &occluder);
        GeneratedItem { sample: Sample { image, label: glyph.label }, source }
    }

    /// Source index of item `i`, without rendering it.
    pub fn source_of(&self, i: u64) -> usize {
        self.mix.pick(&mut RngStream::new(self.seed).substream(i).substream(0))
    }

    pub fn spec(&self) -> &PipelineSpec {
        &self.spec
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Creation metadata for a dataset of `n` items.
    pub fn meta(&self, n: usize) -> crate::dataset::DatasetMeta {
        let mut meta = crate::dataset::DatasetMeta::default();
        meta.set("seed", self.seed);
        meta.set("preset", self.spec.preset_kind().name());
        meta.set(
            "stages",
            self.spec.stages().iter().map(|s| s.name()).collect::<Vec<_>>().join(","),
        );
        meta.set("complexity", format!("{:?}", self.spec.complexity()));
        meta.set("mix", &self.mix_spec);
        meta.set("count", n);
        meta
    }

    pub fn dataset(&self, n: usize) -> LabeledDataset {
        let items = (0..n as u64).map(|i| self.item(i).sample).collect();
        let mut ds = LabeledDataset::new(items).expect("sources emit labels below 62");
        ds.meta = self.meta(n);
        ds
    }
}

/// Serial generation with the standard sources.
pub fn generate_dataset(
    n: usize,
    mix: &SourceMix,
    spec: &PipelineSpec,
    seed: u64,
) -> Result<LabeledDataset, PipelineError> {
    Ok(Generator::new(Pipeline::new(), &SourceRegistry::standard(), mix, spec, seed)?.dataset(n))
}
