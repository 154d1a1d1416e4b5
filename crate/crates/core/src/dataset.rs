//! Labeled image collections, class subsets and index splits.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::ops::Range;

use crate::imgcore::GreyImage;

/// `0-9 → 0..9`, `A-Z → 10..35`, `a-z → 36..61`.
pub const CLASS_COUNT: usize = 62;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum DatasetError {
    #[error("label {0} is outside 0..62")]
    Label(u8),
    #[error("split of {requested} items does not fit a dataset of {available}")]
    Split { requested: usize, available: usize },
    #[error("unknown class set `{0}` (expected all, digits, upper or lower)")]
    ClassSet(String),
}

/// Character for a class label.
pub fn label_char(label: u8) -> Option<char> {
    match label {
        0..=9 => Some((b'0' + label) as char),
        10..=35 => Some((b'A' + label - 10) as char),
        36..=61 => Some((b'a' + label - 36) as char),
        _ => None,
    }
}

/// Class label for a character.
pub fn char_label(c: char) -> Option<u8> {
    match c {
        '0'..='9' => Some(c as u8 - b'0'),
        'A'..='Z' => Some(c as u8 - b'A' + 10),
        'a'..='z' => Some(c as u8 - b'a' + 36),
        _ => None,
    }
}

/// The four tasks: all 62 classes, or one of the three character families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassSet {
    All,
    Digits,
    Upper,
    Lower,
}

impl ClassSet {
    pub const SUBSETS: [ClassSet; 3] = [ClassSet::Digits, ClassSet::Upper, ClassSet::Lower];

    pub fn range(self) -> Range<u8> {
        match self {
            ClassSet::All => 0..62,
            ClassSet::Digits => 0..10,
            ClassSet::Upper => 10..36,
            ClassSet::Lower => 36..62,
        }
    }

    pub fn labels(self) -> Vec<u8> {
        self.range().collect()
    }

    pub fn contains(self, label: u8) -> bool {
        self.range().contains(&label)
    }

    pub fn len(self) -> usize {
        self.range().len()
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassSet::All => "all",
            ClassSet::Digits => "digits",
            ClassSet::Upper => "upper",
            ClassSet::Lower => "lower",
        }
    }
}

impl core::str::FromStr for ClassSet {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" | "all62" => Ok(ClassSet::All),
            "digits" => Ok(ClassSet::Digits),
            "upper" => Ok(ClassSet::Upper),
            "lower" => Ok(ClassSet::Lower),
            other => Err(DatasetError::ClassSet(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub image: GreyImage,
    pub label: u8,
}

/// Ordered `key = value` creation metadata.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DatasetMeta {
    pub entries: Vec<(String, String)>,
}

impl DatasetMeta {
    pub fn set(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LabeledDataset {
    pub items: Vec<Sample>,
    pub meta: DatasetMeta,
}

impl LabeledDataset {
    pub fn new(items: Vec<Sample>) -> Result<Self, DatasetError> {
        if let Some(bad) = items.iter().find(|s| s.label as usize >= CLASS_COUNT) {
            return Err(DatasetError::Label(bad.label));
        }
        Ok(LabeledDataset { items, meta: DatasetMeta::default() })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Copies out `range` with the same metadata.
    pub fn slice(&self, range: Range<usize>) -> LabeledDataset {
        LabeledDataset { items: self.items[range].to_vec(), meta: self.meta.clone() }
    }

    /// Keeps only samples whose label is in `classes`.
    pub fn restrict(&self, classes: ClassSet) -> LabeledDataset {
        LabeledDataset {
            items: self.items.iter().filter(|s| classes.contains(s.label)).cloned().collect(),
            meta: self.meta.clone(),
        }
    }

    /// Count of samples per label.
    pub fn histogram(&self) -> [usize; CLASS_COUNT] {
        let mut h = [0; CLASS_COUNT];
        for s in &self.items {
            h[s.label as usize] += 1;
        }
        h
    }

    /// Quantizes every pixel to 8 bits and back, the precision kept on disk.
    pub fn quantized(&self) -> LabeledDataset {
        LabeledDataset {
            items: self
                .items
                .iter()
                .map(|s| Sample {
                    image: GreyImage::from_u8(&s.image.to_u8()).expect("1024 pixels"),
                    label: s.label,
                })
                .collect(),
            meta: self.meta.clone(),
        }
    }
}

/// Contiguous, disjoint train / validation / test ranges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub train: Range<usize>,
    pub valid: Range<usize>,
    pub test: Range<usize>,
}

impl Split {
    pub fn new(train: usize, valid: usize, test: usize, available: usize) -> Result<Self, DatasetError> {
        let requested = train + valid + test;
        if requested > available {
            return Err(DatasetError::Split { requested, available });
        }
        Ok(Split {
            train: 0..train,
            valid: train..train + valid,
            test: train + valid..requested,
        })
    }

    pub fn apply(&self, ds: &LabeledDataset) -> (LabeledDataset, LabeledDataset, LabeledDataset) {
        (ds.slice(self.train.clone()), ds.slice(self.valid.clone()), ds.slice(self.test.clone()))
    }
}
