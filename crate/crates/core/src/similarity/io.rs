//! Dataset ingestion: descriptor containers (binary and hex text) and scalar CSV.
//!
//! Binary container layout, all integers little-endian `u32`:
//!
//! ```text
//! "ADSC" | item_count | width_bytes | { descriptor_count | count * width bytes }*
//! ```
//!
//! The hex text alternative has one line per item holding that item's
//! descriptors as whitespace-separated hex strings.

use std::path::Path;

use super::{DescriptorSet, SimilarityError};

pub const DESCRIPTOR_MAGIC: &[u8; 4] = b"ADSC";

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Option<&'a [u8]> {
        let end = self.pos.checked_add(len)?;
        let out = self.buf.get(self.pos..end)?;
        self.pos = end;
        Some(out)
    }

    fn u32(&mut self) -> Option<u32> {
        self.take(4).map(|b| u32::from_le_bytes(b.try_into().unwrap()))
    }
}

pub fn decode_descriptor_container(bytes: &[u8]) -> Result<Vec<DescriptorSet>, SimilarityError> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(4) != Some(DESCRIPTOR_MAGIC.as_slice()) {
        return Err(SimilarityError::BadMagic);
    }
    let (count, width) = match (r.u32(), r.u32()) {
        (Some(c), Some(w)) => (c as usize, w as usize),
        _ => return Err(SimilarityError::Truncated { item: 0 }),
    };
    if width == 0 {
        return Err(SimilarityError::ZeroWidth);
    }
    let mut sets = Vec::with_capacity(count.min(1 << 16));
    for item in 0..count {
        let n = r.u32().ok_or(SimilarityError::Truncated { item })? as usize;
        if n == 0 {
            return Err(SimilarityError::EmptyItem { item });
        }
        let len = n.checked_mul(width).ok_or(SimilarityError::Truncated { item })?;
        let data = r.take(len).ok_or(SimilarityError::Truncated { item })?;
        sets.push(DescriptorSet::from_flat(width, data.to_vec()));
    }
    if r.pos != bytes.len() {
        return Err(SimilarityError::TrailingBytes(bytes.len() - r.pos));
    }
    Ok(sets)
}

/// Serializes descriptor sets; all sets must share one width.
pub fn encode_descriptor_container(sets: &[DescriptorSet]) -> Result<Vec<u8>, SimilarityError> {
    let width = sets.first().map_or(super::DEFAULT_DESCRIPTOR_WIDTH, |s| s.width());
    let mut out = Vec::new();
    out.extend_from_slice(DESCRIPTOR_MAGIC);
    out.extend_from_slice(&(sets.len() as u32).to_le_bytes());
    out.extend_from_slice(&(width as u32).to_le_bytes());
    for (item, set) in sets.iter().enumerate() {
        if set.width() != width {
            return Err(SimilarityError::WidthMismatch {
                item,
                expected: width,
                got: set.width(),
            });
        }
        out.extend_from_slice(&(set.len() as u32).to_le_bytes());
        for d in set.iter() {
            out.extend_from_slice(d);
        }
    }
    Ok(out)
}

pub fn load_descriptor_sets(path: impl AsRef<Path>) -> Result<Vec<DescriptorSet>, SimilarityError> {
    decode_descriptor_container(&std::fs::read(path)?)
}

pub fn parse_descriptor_hex(text: &str) -> Result<Vec<DescriptorSet>, SimilarityError> {
    let mut width = None;
    let mut sets = Vec::new();
    for (item, line) in text.lines().enumerate() {
        let mut descriptors = Vec::new();
        for tok in line.split_whitespace() {
            let bytes = hex::decode(tok).map_err(|e| SimilarityError::Parse {
                line: item + 1,
                message: format!("invalid hex descriptor {tok:?}: {e}"),
            })?;
            let expected = *width.get_or_insert(bytes.len());
            if bytes.len() != expected {
                return Err(SimilarityError::WidthMismatch {
                    item,
                    expected,
                    got: bytes.len(),
                });
            }
            descriptors.push(bytes);
        }
        if descriptors.is_empty() {
            return Err(SimilarityError::EmptyItem { item });
        }
        sets.push(DescriptorSet::new(width.unwrap_or_default(), descriptors)?);
    }
    Ok(sets)
}

pub fn encode_descriptor_hex(sets: &[DescriptorSet]) -> String {
    let mut out = String::new();
    for set in sets {
        let line: Vec<String> = set.iter().map(hex::encode).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn load_descriptor_sets_hex(path: impl AsRef<Path>) -> Result<Vec<DescriptorSet>, SimilarityError> {
    parse_descriptor_hex(&std::fs::read_to_string(path)?)
}

/// Reads a scalar CSV (one row per item, one column per feature) into columns.
///
/// A first row that does not parse entirely as numbers is taken as a header.
pub fn parse_scalar_csv(text: &str) -> Result<Vec<Vec<f64>>, SimilarityError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record?;
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let row = match parsed {
            Ok(row) => row,
            Err(_) if idx == 0 => continue,
            Err(e) => {
                return Err(SimilarityError::Parse {
                    line: idx + 1,
                    message: e.to_string(),
                })
            }
        };
        if let Some(v) = row.iter().find(|v| !v.is_finite()) {
            return Err(SimilarityError::Parse {
                line: idx + 1,
                message: format!("non-finite value {v}"),
            });
        }
        if columns.is_empty() {
            columns = vec![Vec::new(); row.len()];
        }
        for (col, v) in columns.iter_mut().zip(row) {
            col.push(v);
        }
    }
    if columns.is_empty() || columns[0].is_empty() {
        return Err(SimilarityError::EmptyDataset);
    }
    Ok(columns)
}

pub fn load_scalar_csv(path: impl AsRef<Path>) -> Result<Vec<Vec<f64>>, SimilarityError> {
    parse_scalar_csv(&std::fs::read_to_string(path)?)
}
