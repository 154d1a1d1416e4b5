//! Procedural character source.
//!
//! Each of the 62 classes is a pen skeleton written in a small path
//! language on a 10×18 unit box (caps and digits span y 0..14, x-height
//! starts at 5, descenders reach 18). Polylines are separated by `|`; a
//! token is either a point `x,y` or an arc `a:cx,cy,rx,ry,from,to` with
//! angles in degrees (0 = right, 90 = down).
//!
//! A [`SyntheticSource`] renders skeletons through a per-source style
//! (stroke width, jitter, writer variation) so that several sources with
//! different statistics can feed the same mixing machinery.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::dataset::{ClassSet, Sample};
use crate::imgcore::{rasterize_strokes, GreyImage, Point, CENTER};
use crate::math;
use crate::rng::RngStream;

/// Anything that can emit labeled 32×32 glyphs.
pub trait GlyphSource: Send + Sync {
    fn name(&self) -> &str;
    fn classes(&self) -> ClassSet;
    fn draw(&self, rng: &mut RngStream) -> Sample;
}

const SKELETONS: [&str; 62] = [
    // 0-9
    "a:4,7,4,7,0,360",
    "1.5,3 4,0 4,14",
    "a:4,4,4,4,180,360 0,14 8,14",
    "a:4,3.5,3.5,3.5,200,450 a:4,10.5,4,3.5,270,510",
    "6,14 6,0 0,10 8,10",
    "7,0 1,0 0.5,6 a:4,9.5,4,4.5,240,490",
    "7,0 0,10 a:4,10,4,4,180,540",
    "0,0 8,0 3,14",
    "a:4,3.5,3.5,3.5,90,450 | a:4,10.5,4,3.5,270,630",
    "a:4,4,4,4,0,360 | 8,4 7,14",
    // A-Z
    "0,14 5,0 10,14 | 2,9 8,9",
    "0,0 0,14 | 0,0 6,0 a:6,3.5,3.5,3.5,270,450 0,7 | 0,7 6.5,7 a:6.5,10.5,3.5,3.5,270,450 0,14",
    "a:5.5,7,5,7,-45,-315",
    "0,0 0,14 | 0,0 4,0 a:4,7,6,7,-90,90 0,14",
    "10,0 0,0 0,14 10,14 | 0,7 7,7",
    "10,0 0,0 0,14 | 0,7 7,7",
    "a:5,7,5,7,-40,-360 6,7",
    "0,0 0,14 | 10,0 10,14 | 0,7 10,7",
    "5,0 5,14 | 2,0 8,0 | 2,14 8,14",
    "8,0 8,10 a:4,10,4,4,0,180",
    "0,0 0,14 | 9,0 0,8 | 3,5.5 10,14",
    "0,0 0,14 9,14",
    "0,14 0,0 5,9 10,0 10,14",
    "0,14 0,0 10,14 10,0",
    "a:5,7,5,7,0,360",
    "0,14 0,0 6,0 a:6,3.75,3.75,3.75,270,450 0,7.5",
    "a:5,7,5,7,0,360 | 6,10 10,14.5",
    "0,14 0,0 6,0 a:6,3.75,3.75,3.75,270,450 0,7.5 | 4,7.5 10,14",
    "a:5,3.5,4.5,3.5,-20,-270 a:5,10.5,5,3.5,-90,160",
    "0,0 10,0 | 5,0 5,14",
    "0,0 0,9 a:5,9,5,5,180,0 10,0",
    "0,0 5,14 10,0",
    "0,0 2.5,14 5,5 7.5,14 10,0",
    "0,0 10,14 | 10,0 0,14",
    "0,0 5,7 10,0 | 5,7 5,14",
    "0,0 10,0 0,14 10,14",
    // a-z
    "a:4,9.5,4,4.5,0,360 | 8,5 8,14",
    "0,0 0,14 | a:4,9.5,4,4.5,0,360",
    "a:4.5,9.5,4.5,4.5,-40,-320",
    "8,0 8,14 | a:4,9.5,4,4.5,0,360",
    "0,9.5 8,9.5 a:4,9.5,4,4.5,0,-300",
    "a:5,3,2,2,-30,-180 3,14 | 0,6 6,6",
    "a:4,9,4,4,0,360 | 8,5 8,15 a:4,15,4,3,0,160",
    "0,0 0,14 | 0,9 a:4,9,4,4,180,360 8,14",
    "4,5 4,14 | 4,1.5 4,2.5",
    "5,5 5,15 a:2.5,15,2.5,3,0,150 | 5,1.5 5,2.5",
    "0,0 0,14 | 7,5 0,10.5 | 2.5,8.8 8,14",
    "4,0 4,14",
    "0,5 0,14 | 0,8 a:2.5,8,2.5,3,180,360 5,14 | 5,8 a:7.5,8,2.5,3,180,360 10,14",
    "0,5 0,14 | 0,9 a:4,9,4,4,180,360 8,14",
    "a:4,9.5,4,4.5,0,360",
    "0,5 0,18 | a:4,9.5,4,4.5,0,360",
    "8,5 8,18 | a:4,9.5,4,4.5,0,360",
    "0,5 0,14 | 0,9 a:4.5,9,4.5,4,180,300",
    "a:4,7.25,3.5,2.25,-20,-270 a:4,11.75,4,2.25,-90,160",
    "3,1 3,12 a:5.5,12,2.5,2,180,90 | 0,5 7,5",
    "0,5 0,10 a:4,10,4,4,180,0 8,5 | 8,10 8,14",
    "0,5 4,14 8,5",
    "0,5 2.5,14 5,7 7.5,14 10,5",
    "0,5 8,14 | 8,5 0,14",
    "0,5 4,14 | 8,5 2,18",
    "0,5 8,5 0,14 8,14",
];

/// Glyph skeleton: polylines in glyph units.
pub type Skeleton = Vec<Vec<Point>>;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
#[error("bad glyph path token `{0}`")]
pub struct PathError(pub String);

fn parse_numbers(s: &str, out: &mut [f64]) -> Result<(), PathError> {
    let mut parts = s.split(',');
    for slot in out.iter_mut() {
        *slot = parts
            .next()
            .and_then(|p| p.trim().parse::<f64>().ok())
            .ok_or_else(|| PathError(s.into()))?;
    }
    if parts.next().is_some() {
        return Err(PathError(s.into()));
    }
    Ok(())
}

/// Parses the path language described in the module docs.
pub fn parse_skeleton(path: &str) -> Result<Skeleton, PathError> {
    let mut strokes = Vec::new();
    for part in path.split('|') {
        let mut pts: Vec<Point> = Vec::new();
        for tok in part.split_whitespace() {
            if let Some(arc) = tok.strip_prefix("a:") {
                let mut v = [0.0; 6];
                parse_numbers(arc, &mut v)?;
                let [cx, cy, rx, ry, from, to] = v;
                let segments = ((math::abs(to - from) / 22.5) as usize).max(4);
                for k in 0..=segments {
                    let t = (from + (to - from) * k as f64 / segments as f64).to_radians();
                    pts.push((cx + rx * math::cos(t), cy + ry * math::sin(t)));
                }
            } else {
                let mut v = [0.0; 2];
                parse_numbers(tok, &mut v)?;
                pts.push((v[0], v[1]));
            }
        }
        if pts.is_empty() {
            return Err(PathError(part.into()));
        }
        strokes.push(pts);
    }
    Ok(strokes)
}

/// Skeleton for `label` (0..62).
pub fn skeleton(label: u8) -> Option<Skeleton> {
    SKELETONS.get(label as usize).map(|p| parse_skeleton(p).expect("built-in glyph paths parse"))
}

/// Rendering statistics for one source.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticStyle {
    /// Uniform translation jitter, ± pixels per axis.
    pub translate: f64,
    /// Uniform relative scale jitter, ±.
    pub scale_jitter: f64,
    /// Stroke width range in pixels.
    pub width: (f64, f64),
    /// Std (glyph units) of independent per-point noise.
    pub point_jitter: f64,
    /// Writers are fixed per source; each has a shear in `±slant`.
    pub slant: f64,
    pub writers: usize,
}

/// Pixels per glyph unit before jitter.
pub const GLYPH_SCALE: f64 = 1.55;
/// Glyphs taller or wider than this many pixels are scaled down to fit.
pub const MAX_EXTENT: f64 = 22.0;

impl SyntheticStyle {
    /// ±1 px translation, ±5 % scale, medium pen, no writer variation.
    pub fn plain() -> Self {
        SyntheticStyle {
            translate: 1.0,
            scale_jitter: 0.05,
            width: (2.6, 3.4),
            point_jitter: 0.0,
            slant: 0.0,
            writers: 1,
        }
    }

    /// No randomness at all: every draw of a label renders the same image.
    pub fn exact() -> Self {
        SyntheticStyle {
            translate: 0.0,
            scale_jitter: 0.0,
            width: (3.0, 3.0),
            point_jitter: 0.0,
            slant: 0.0,
            writers: 1,
        }
    }

    /// Clean printed glyphs.
    pub fn fonts() -> Self {
        SyntheticStyle { width: (2.4, 3.8), ..Self::plain() }
    }

    /// Bold, wobbly glyphs with strong shear.
    pub fn captcha() -> Self {
        SyntheticStyle {
            width: (3.0, 4.2),
            point_jitter: 0.35,
            slant: 0.3,
            writers: 8,
            ..Self::plain()
        }
    }

    /// Thin scanned print.
    pub fn ocr() -> Self {
        SyntheticStyle {
            width: (2.2, 3.0),
            point_jitter: 0.1,
            slant: 0.05,
            writers: 4,
            ..Self::plain()
        }
    }

    /// Handwriting: many writers, per-point noise, varied pens.
    pub fn handwriting() -> Self {
        SyntheticStyle {
            width: (2.4, 3.8),
            point_jitter: 0.45,
            slant: 0.2,
            writers: 32,
            ..Self::plain()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Writer {
    shear: f64,
    width_factor: f64,
    aspect: f64,
}

/// Renders the built-in skeletons with a [`SyntheticStyle`].
#[derive(Clone, Debug)]
pub struct SyntheticSource {
    name: String,
    classes: ClassSet,
    style: SyntheticStyle,
    writers: Vec<Writer>,
    skeletons: Arc<Vec<Skeleton>>,
}

fn all_skeletons() -> Vec<Skeleton> {
    (0..62).map(|l| skeleton(l).expect("62 glyphs")).collect()
}

impl SyntheticSource {
    /// Writers are drawn once from `seed`.
    pub fn new(name: &str, classes: ClassSet, style: SyntheticStyle, seed: u64) -> Self {
        let mut rng = RngStream::new(seed);
        let writers = (0..style.writers.max(1))
            .map(|_| {
                if style.slant == 0.0 && style.writers <= 1 {
                    return Writer { shear: 0.0, width_factor: 1.0, aspect: 1.0 };
                }
                Writer {
                    shear: rng.uniform(-style.slant, style.slant),
                    width_factor: rng.uniform(0.85, 1.15),
                    aspect: rng.uniform(0.85, 1.1),
                }
            })
            .collect();
        SyntheticSource {
            name: name.into(),
            classes,
            style,
            writers,
            skeletons: Arc::new(all_skeletons()),
        }
    }

    pub fn style(&self) -> &SyntheticStyle {
        &self.style
    }

    /// Renders `label` with explicit randomness; used by [`GlyphSource::draw`].
    pub fn render(&self, label: u8, rng: &mut RngStream) -> GreyImage {
        let st = &self.style;
        let writer = &self.writers[rng.index(self.writers.len())];
        let scale = GLYPH_SCALE * (1.0 + rng.uniform(-st.scale_jitter, st.scale_jitter));
        let tx = rng.uniform(-st.translate, st.translate);
        let ty = rng.uniform(-st.translate, st.translate);
        let width = rng.uniform(st.width.0, st.width.1) * writer.width_factor;

        let mut strokes: Skeleton = self.skeletons[label as usize].clone();
        for p in strokes.iter_mut().flatten() {
            // shear about the cap-height middle
            p.0 = p.0 * writer.aspect - writer.shear * (p.1 - 7.0);
            if st.point_jitter > 0.0 {
                p.0 += rng.normal(0.0, st.point_jitter);
                p.1 += rng.normal(0.0, st.point_jitter);
            }
        }
        let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for p in strokes.iter().flatten() {
            x0 = x0.min(p.0);
            y0 = y0.min(p.1);
            x1 = x1.max(p.0);
            y1 = y1.max(p.1);
        }
        let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
        let scale = scale.min(scale * MAX_EXTENT / (GLYPH_SCALE * (x1 - x0).max(y1 - y0)));
        for p in strokes.iter_mut().flatten() {
            *p = (CENTER + (p.0 - cx) * scale + tx, CENTER + (p.1 - cy) * scale + ty);
        }
        rasterize_strokes(&strokes, width)
    }
}

impl GlyphSource for SyntheticSource {
    fn name(&self) -> &str {
        &self.name
    }

    fn classes(&self) -> ClassSet {
        self.classes
    }

    /// Draws: class (1+), writer (1+), scale, two offsets, width, then two
    /// normals per skeleton point when the style has point jitter.
    fn draw(&self, rng: &mut RngStream) -> Sample {
        let range = self.classes.range();
        let label = range.start + rng.index(range.len()) as u8;
        Sample { image: self.render(label, rng), label }
    }
}

/// Desk-scale source with ±1 px / ±5 % jitter over `classes`.
pub fn synthetic_source(classes: ClassSet, seed: u64) -> SyntheticSource {
    SyntheticSource::new("synthetic", classes, SyntheticStyle::plain(), seed)
}

/// The four stand-ins for the fonts, captcha, OCR and handwriting sources,
/// named `fonts`, `captcha`, `ocr` and `nist`.
pub fn standin_sources(seed: u64) -> [SyntheticSource; 4] {
    let base = RngStream::new(seed);
    [
        SyntheticSource::new("fonts", ClassSet::All, SyntheticStyle::fonts(), base.substream(0).seed()),
        SyntheticSource::new("captcha", ClassSet::All, SyntheticStyle::captcha(), base.substream(1).seed()),
        SyntheticSource::new("ocr", ClassSet::All, SyntheticStyle::ocr(), base.substream(2).seed()),
        SyntheticSource::new("nist", ClassSet::All, SyntheticStyle::handwriting(), base.substream(3).seed()),
    ]
}
