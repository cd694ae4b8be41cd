//! Binary embedding cache and its JSON manifest.
//!
//! Each record is little-endian: magic `BWMD`, format version `u16`, alphabet
//! size `u32`, entry count `u32`, then `entry_count` pairs of index `u32` and
//! weight `f64`. Records are concatenated; the manifest maps sequence ids to
//! byte offsets.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::embed::BwmdEmbedding;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"BWMD";
pub const FORMAT_VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 4 + 4;
const ENTRY_LEN: usize = 4 + 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub id: String,
    pub offset: u64,
    pub entry_count: u32,
    pub source_length: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheManifest {
    pub format_version: u16,
    pub alphabet_size: u32,
    pub dimension: u64,
    pub records: Vec<ManifestRecord>,
}

/// Encodes one record.
pub fn encode_record(embedding: &BwmdEmbedding, out: &mut Vec<u8>) {
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&embedding.alphabet_size().to_le_bytes());
    out.extend_from_slice(&(embedding.nnz() as u32).to_le_bytes());
    for &(i, w) in embedding.entries() {
        out.extend_from_slice(&i.to_le_bytes());
        out.extend_from_slice(&w.to_le_bytes());
    }
}

/// Decodes the record starting at `offset`, returning it and the next offset.
pub fn decode_record(
    bytes: &[u8],
    offset: usize,
    source_length: usize,
) -> Result<(BwmdEmbedding, usize)> {
    let bad = |reason: &str| Error::InvalidArgument(format!("cache record at {offset}: {reason}"));
    let header = bytes
        .get(offset..offset + HEADER_LEN)
        .ok_or_else(|| bad("truncated header"))?;
    if &header[..4] != MAGIC {
        return Err(bad("bad magic"));
    }
    let version = u16::from_le_bytes([header[4], header[5]]);
    if version != FORMAT_VERSION {
        return Err(bad(&format!("unsupported version {version}")));
    }
    let alphabet_size = u32::from_le_bytes(header[6..10].try_into().unwrap());
    let count = u32::from_le_bytes(header[10..14].try_into().unwrap()) as usize;
    let start = offset + HEADER_LEN;
    let end = start + count * ENTRY_LEN;
    let body = bytes
        .get(start..end)
        .ok_or_else(|| bad("truncated entries"))?;
    let entries = body
        .chunks_exact(ENTRY_LEN)
        .map(|c| {
            (
                u32::from_le_bytes(c[..4].try_into().unwrap()),
                f64::from_le_bytes(c[4..].try_into().unwrap()),
            )
        })
        .collect();
    Ok((
        BwmdEmbedding::from_parts(entries, alphabet_size, source_length)?,
        end,
    ))
}

/// Writes `items` to `cache_path` and the manifest to `manifest_path`.
pub fn write_cache(
    items: &[(String, BwmdEmbedding)],
    alphabet_size: u32,
    cache_path: &Path,
    manifest_path: &Path,
) -> Result<CacheManifest> {
    let mut bytes = Vec::new();
    let mut records = Vec::with_capacity(items.len());
    for (id, e) in items {
        if e.alphabet_size() != alphabet_size {
            return Err(Error::AlphabetMismatch {
                left: alphabet_size,
                right: e.alphabet_size(),
            });
        }
        records.push(ManifestRecord {
            id: id.clone(),
            offset: bytes.len() as u64,
            entry_count: e.nnz() as u32,
            source_length: e.source_length() as u64,
        });
        encode_record(e, &mut bytes);
    }
    let manifest = CacheManifest {
        format_version: FORMAT_VERSION,
        alphabet_size,
        dimension: u64::from(alphabet_size) * u64::from(alphabet_size),
        records,
    };
    fs::write(cache_path, &bytes).map_err(|e| Error::io(cache_path, e))?;
    let json = serde_json::to_string_pretty(&manifest)?;
    fs::write(manifest_path, json).map_err(|e| Error::io(manifest_path, e))?;
    Ok(manifest)
}

/// Reads every embedding listed in the manifest.
pub fn read_cache(
    cache_path: &Path,
    manifest_path: &Path,
) -> Result<(CacheManifest, Vec<(String, BwmdEmbedding)>)> {
    let text = fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let manifest: CacheManifest = serde_json::from_str(&text)?;
    let bytes = fs::read(cache_path).map_err(|e| Error::io(cache_path, e))?;
    let items = manifest
        .records
        .iter()
        .map(|r| {
            let (e, _) = decode_record(&bytes, r.offset as usize, r.source_length as usize)?;
            Ok((r.id.clone(), e))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((manifest, items))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::embed;
    use crate::sequence::Sequence;

    #[test]
    fn record_layout() {
        let e = embed(&Sequence::new("a", vec![0; 4], 1).unwrap()).unwrap();
        let mut buf = Vec::new();
        encode_record(&e, &mut buf);
        assert_eq!(buf.len(), HEADER_LEN + ENTRY_LEN);
        assert_eq!(&buf[..4], b"BWMD");
        assert_eq!(&buf[4..6], &[1, 0]);
        assert_eq!(&buf[6..10], &[1, 0, 0, 0]);
        assert_eq!(&buf[10..14], &[1, 0, 0, 0]);
        let (back, next) = decode_record(&buf, 0, 4).unwrap();
        assert_eq!(back, e);
        assert_eq!(next, buf.len());
    }

    #[test]
    fn rejects_corrupt_records() {
        let e = embed(&Sequence::new("a", vec![0; 4], 1).unwrap()).unwrap();
        let mut buf = Vec::new();
        encode_record(&e, &mut buf);
        assert!(decode_record(&buf[..buf.len() - 1], 0, 4).is_err());
        buf[0] = b'X';
        assert!(decode_record(&buf, 0, 4).is_err());
    }
}
