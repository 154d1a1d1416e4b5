//! CDS dataset files.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "CDS1"
//! 4       2     version (u16 LE, currently 1)
//! 6       2     reserved, zero
//! 8       8     item count (u64 LE)
//! 16      1025  item 0: 1024 pixel levels (row-major), 1 label byte
//! ...
//! ```
//!
//! Pixels are stored as `round(255 v)` and read back as `k / 255`. The
//! creation metadata lives next to the data in `<path>.meta`, one
//! `key=value` per line.

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use glyphwarp_core::dataset::{DatasetMeta, CLASS_COUNT};
use glyphwarp_core::imgcore::PIXELS;
use glyphwarp_core::{GreyImage, LabeledDataset, Sample};

pub const MAGIC: [u8; 4] = *b"CDS1";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 16;
pub const RECORD_LEN: usize = PIXELS + 1;

#[derive(Debug, thiserror::Error)]
pub enum CdsError {
    #[error("not a CDS file (magic {0:02x?})")]
    BadMagic([u8; 4]),
    #[error("unsupported CDS version {0}")]
    Version(u16),
    #[error("file truncated: header promises {expected} bytes, found {found}")]
    Truncated { expected: u64, found: u64 },
    #[error("item {index} has label {label}, outside 0..62")]
    LabelRange { index: u64, label: u8 },
    #[error("malformed metadata line {0:?}")]
    Meta(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn meta_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".meta");
    PathBuf::from(name)
}

pub fn encode(ds: &LabeledDataset) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + ds.len() * RECORD_LEN);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&0u16.to_le_bytes());
    out.extend_from_slice(&(ds.len() as u64).to_le_bytes());
    for s in &ds.items {
        out.extend(s.image.to_u8());
        out.push(s.label);
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<LabeledDataset, CdsError> {
    let found = bytes.len() as u64;
    if bytes.len() < HEADER_LEN {
        // a short prefix of the magic is still a truncated CDS file
        let n = bytes.len().min(4);
        if bytes[..n] != MAGIC[..n] {
            let mut magic = [0; 4];
            magic[..n].copy_from_slice(&bytes[..n]);
            return Err(CdsError::BadMagic(magic));
        }
        return Err(CdsError::Truncated { expected: HEADER_LEN as u64, found });
    }
    let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(CdsError::BadMagic(magic));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(CdsError::Version(version));
    }
    let count = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let expected = count
        .checked_mul(RECORD_LEN as u64)
        .and_then(|b| b.checked_add(HEADER_LEN as u64))
        .unwrap_or(u64::MAX);
    if found < expected {
        return Err(CdsError::Truncated { expected, found });
    }
    let mut items = Vec::with_capacity(count as usize);
    for (index, rec) in bytes[HEADER_LEN..expected as usize].chunks_exact(RECORD_LEN).enumerate() {
        let label = rec[PIXELS];
        if label as usize >= CLASS_COUNT {
            return Err(CdsError::LabelRange { index: index as u64, label });
        }
        items.push(Sample { image: GreyImage::from_u8(&rec[..PIXELS]).unwrap(), label });
    }
    Ok(LabeledDataset::new(items).expect("labels checked above"))
}

pub fn format_meta(meta: &DatasetMeta) -> String {
    meta.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
}

pub fn parse_meta(text: &str) -> Result<DatasetMeta, CdsError> {
    let mut meta = DatasetMeta::default();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let (k, v) = line.split_once('=').ok_or_else(|| CdsError::Meta(line.to_string()))?;
        meta.set(k.trim(), v.trim());
    }
    Ok(meta)
}

/// Writes the data file and, when there is any metadata, its sidecar.
pub fn write_cds(ds: &LabeledDataset, path: &Path) -> Result<(), CdsError> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&encode(ds))?;
    w.flush()?;
    let meta = meta_path(path);
    if ds.meta.entries.is_empty() {
        match fs::remove_file(&meta) {
            Err(e) if e.kind() != io::ErrorKind::NotFound => return Err(e.into()),
            _ => {}
        }
    } else {
        fs::write(meta, format_meta(&ds.meta))?;
    }
    Ok(())
}

/// Reads a data file and its sidecar, if present.
pub fn read_cds(path: &Path) -> Result<LabeledDataset, CdsError> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    let mut ds = decode(&bytes)?;
    match fs::read_to_string(meta_path(path)) {
        Ok(text) => ds.meta = parse_meta(&text)?,
        Err(e) if e.kind() == io::ErrorKind::NotFound => {}
        Err(e) => return Err(e.into()),
    }
    Ok(ds)
}
