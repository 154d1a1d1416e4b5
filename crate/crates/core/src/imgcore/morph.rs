use alloc::vec::Vec;

use super::GreyImage;

/// Number of elements on the thickness ladder.
pub const ELEMENT_COUNT: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MorphMode {
    Dilate,
    Erode,
}

/// Binary mask of at most 5×5 cells, stored as offsets from the anchor.
///
/// For even sides the anchor is the upper-left of the four central cells,
/// so offsets run `-(side/2 - 1) ..= side/2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuringElement {
    rank: usize,
    side: usize,
    offsets: Vec<(i64, i64)>,
}

fn span(side: usize) -> core::ops::RangeInclusive<i64> {
    let lo = -((side as i64 - 1) / 2);
    lo..=lo + side as i64 - 1
}

fn square(side: usize, keep: impl Fn(i64, i64) -> bool) -> (usize, Vec<(i64, i64)>) {
    let mut offsets = Vec::new();
    for dy in span(side) {
        for dx in span(side) {
            if keep(dx, dy) {
                offsets.push((dx, dy));
            }
        }
    }
    (side, offsets)
}

impl StructuringElement {
    /// Element `rank` (0–9) of the ladder, ordered by active-cell count:
    ///
    /// | rank | shape        | cells |
    /// |------|--------------|-------|
    /// | 0    | 1×1 center   | 1     |
    /// | 1    | 2×2          | 4     |
    /// | 2    | 3×3 plus     | 5     |
    /// | 3    | 3×3 full     | 9     |
    /// | 4    | 5×5 plus     | 9     |
    /// | 5    | 4×4 plus     | 12    |
    /// | 6    | 5×5 diamond  | 13    |
    /// | 7    | 4×4 full     | 16    |
    /// | 8    | 5×5 disc     | 21    |
    /// | 9    | 5×5 full     | 25    |
    pub fn ladder(rank: usize) -> Option<Self> {
        let (side, offsets) = match rank {
            0 => square(1, |_, _| true),
            1 => square(2, |_, _| true),
            2 => square(3, |dx, dy| dx == 0 || dy == 0),
            3 => square(3, |_, _| true),
            4 => square(5, |dx, dy| dx == 0 || dy == 0),
            // two-wide arms: the central 2×2 block extended to the borders
            5 => square(4, |dx, dy| (0..=1).contains(&dx) || (0..=1).contains(&dy)),
            6 => square(5, |dx, dy| dx.abs() + dy.abs() <= 2),
            7 => square(4, |_, _| true),
            8 => square(5, |dx, dy| dx * dx + dy * dy <= 5),
            9 => square(5, |_, _| true),
            _ => return None,
        };
        Some(StructuringElement { rank, side, offsets })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn active_cells(&self) -> usize {
        self.offsets.len()
    }

    pub fn offsets(&self) -> &[(i64, i64)] {
        &self.offsets
    }
}

/// Grey-scale dilation (max) or erosion (min) over the element's active
/// cells. Off-grid neighbours read 0 when dilating and 1 when eroding.
pub fn morph(img: &GreyImage, elem: &StructuringElement, mode: MorphMode) -> GreyImage {
    let outside = match mode {
        MorphMode::Dilate => 0.0,
        MorphMode::Erode => 1.0,
    };
    GreyImage::from_fn(|x, y| {
        let vals = elem
            .offsets
            .iter()
            .map(|&(dx, dy)| img.get_or(x as i64 + dx, y as i64 + dy, outside));
        let v = match mode {
            MorphMode::Dilate => vals.fold(f32::NEG_INFINITY, f32::max),
            MorphMode::Erode => vals.fold(f32::INFINITY, f32::min),
        };
        v as f64
    })
}
