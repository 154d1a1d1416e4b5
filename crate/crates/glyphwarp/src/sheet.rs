//! Contact sheets: the first `rows × cols` images tiled into one P5 graymap.

use std::fs;
use std::io;
use std::path::Path;

use glyphwarp_core::imgcore::{quantize, SIZE};
use glyphwarp_core::LabeledDataset;

/// Gap between tiles, filled with 0.
pub const SEPARATOR: usize = 2;

#[derive(Debug, thiserror::Error)]
pub enum SheetError {
    #[error("a {rows}x{cols} sheet needs {} images, dataset has {available}", rows * cols)]
    Oversize { rows: usize, cols: usize, available: usize },
    #[error("sheet needs at least one row and one column")]
    Empty,
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn sheet_dims(rows: usize, cols: usize) -> (usize, usize) {
    let side = |n: usize| n * SIZE + n.saturating_sub(1) * SEPARATOR;
    (side(cols), side(rows))
}

/// Encoded P5 file: header, then `width × height` bytes.
pub fn contact_sheet(ds: &LabeledDataset, rows: usize, cols: usize) -> Result<Vec<u8>, SheetError> {
    if rows == 0 || cols == 0 {
        return Err(SheetError::Empty);
    }
    if rows * cols > ds.len() {
        return Err(SheetError::Oversize { rows, cols, available: ds.len() });
    }
    let (width, height) = sheet_dims(rows, cols);
    let mut pixels = vec![0u8; width * height];
    for (i, s) in ds.items[..rows * cols].iter().enumerate() {
        let (ox, oy) = ((i % cols) * (SIZE + SEPARATOR), (i / cols) * (SIZE + SEPARATOR));
        for y in 0..SIZE {
            for x in 0..SIZE {
                pixels[(oy + y) * width + ox + x] = quantize(s.image.get(x, y));
            }
        }
    }
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend(pixels);
    Ok(out)
}

pub fn export_contact_sheet(ds: &LabeledDataset, rows: usize, cols: usize, path: &Path) -> Result<(), SheetError> {
    fs::write(path, contact_sheet(ds, rows, cols)?)?;
    Ok(())
}
