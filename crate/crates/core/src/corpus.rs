//! FASTA and raw-byte corpus ingestion, label maps and corpus manifests.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::sequence::{Alphabet, Sequence};

/// Handling of FASTA residues other than A, C, G, T.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AmbiguityPolicy {
    #[default]
    Drop,
    MapToA,
    Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusItem {
    pub sequence: Sequence,
    pub label: Option<String>,
    pub path: Option<PathBuf>,
}

impl CorpusItem {
    pub fn id(&self) -> &str {
        self.sequence.id()
    }

    /// Too short to embed (fewer than two tokens).
    pub fn is_degenerate(&self) -> bool {
        self.sequence.len() < 2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    alphabet: Alphabet,
    items: Vec<CorpusItem>,
}

impl Corpus {
    pub fn new(alphabet: Alphabet, items: Vec<CorpusItem>) -> Result<Self> {
        let mut ids = HashSet::new();
        for item in &items {
            if !ids.insert(item.id().to_string()) {
                return Err(Error::DuplicateId(item.id().to_string()));
            }
            if item.sequence.alphabet_size() != alphabet.size() {
                return Err(Error::AlphabetMismatch {
                    left: alphabet.size(),
                    right: item.sequence.alphabet_size(),
                });
            }
        }
        Ok(Corpus { alphabet, items })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn items(&self) -> &[CorpusItem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn ids(&self) -> Vec<String> {
        self.items.iter().map(|i| i.id().to_string()).collect()
    }

    pub fn sequences(&self) -> Vec<&Sequence> {
        self.items.iter().map(|i| &i.sequence).collect()
    }

    /// Labels for every item, or `None` if any item is unlabeled.
    pub fn labels(&self) -> Option<Vec<String>> {
        self.items.iter().map(|i| i.label.clone()).collect()
    }

    pub fn degenerate_ids(&self) -> Vec<String> {
        self.items
            .iter()
            .filter(|i| i.is_degenerate())
            .map(|i| i.id().to_string())
            .collect()
    }

    /// Attaches labels by item id; `required` makes a missing label an error.
    pub fn with_labels(mut self, labels: &HashMap<String, String>, required: bool) -> Result<Self> {
        for item in &mut self.items {
            match labels.get(item.id()) {
                Some(l) => item.label = Some(l.clone()),
                None if required => return Err(Error::MissingLabel(item.id().to_string())),
                None => {}
            }
        }
        Ok(self)
    }
}

fn dna_code(b: u8) -> Option<u32> {
    match b.to_ascii_uppercase() {
        b'A' => Some(0),
        b'C' => Some(1),
        b'G' => Some(2),
        b'T' => Some(3),
        _ => None,
    }
}

/// Parses FASTA text into DNA sequences. `origin` is used in error messages.
pub fn parse_fasta(text: &str, policy: AmbiguityPolicy, origin: &Path) -> Result<Vec<Sequence>> {
    let malformed = |reason: String| Error::Malformed {
        path: origin.to_path_buf(),
        reason,
    };
    let mut records: Vec<(String, Vec<u32>)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if let Some(header) = line.strip_prefix('>') {
            let id = header.trim();
            if id.is_empty() {
                return Err(malformed(format!("line {}: empty header", lineno + 1)));
            }
            records.push((id.to_string(), Vec::new()));
            continue;
        }
        let residues = line.trim();
        if residues.is_empty() || residues.starts_with(';') {
            continue;
        }
        let Some((id, tokens)) = records.last_mut() else {
            return Err(malformed(format!(
                "line {}: sequence data before the first header",
                lineno + 1
            )));
        };
        for b in residues.bytes().filter(|b| !b.is_ascii_whitespace()) {
            match (dna_code(b), policy) {
                (Some(t), _) => tokens.push(t),
                (None, AmbiguityPolicy::Drop) => {}
                (None, AmbiguityPolicy::MapToA) => tokens.push(0),
                (None, AmbiguityPolicy::Error) => {
                    return Err(malformed(format!(
                        "line {}: residue '{}' in record {id}",
                        lineno + 1,
                        char::from(b)
                    )))
                }
            }
        }
    }
    if records.is_empty() {
        return Err(malformed("no FASTA records".into()));
    }
    records
        .into_iter()
        .map(|(id, tokens)| Sequence::new(id, tokens, 4))
        .collect()
}

/// Loads a FASTA file as a DNA corpus.
pub fn load_fasta(path: &Path, policy: AmbiguityPolicy) -> Result<Corpus> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let items = parse_fasta(&text, policy, path)?
        .into_iter()
        .map(|sequence| CorpusItem {
            sequence,
            label: None,
            path: Some(path.to_path_buf()),
        })
        .collect();
    Corpus::new(Alphabet::Dna, items)
}

/// Reads a `filename,label` CSV. A first row of `filename,label` is skipped.
pub fn load_labels(path: &Path) -> Result<HashMap<String, String>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_path(path)
        .map_err(|e| Error::Malformed {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
    let mut map = HashMap::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Malformed {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        if record.len() != 2 {
            return Err(Error::Malformed {
                path: path.to_path_buf(),
                reason: format!("row {}: expected filename,label", row + 1),
            });
        }
        if row == 0 && &record[0] == "filename" && &record[1] == "label" {
            continue;
        }
        map.insert(record[0].to_string(), record[1].to_string());
    }
    Ok(map)
}

/// Loads every regular file in `dir` (sorted by name) as a byte sequence.
///
/// With a label map, every file must have a label.
pub fn load_bytes_dir(
    dir: &Path,
    labels: Option<&HashMap<String, String>>,
    exec: Execution,
) -> Result<Corpus> {
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let ty = entry.file_type().map_err(|e| Error::io(entry.path(), e))?;
        if ty.is_file() {
            paths.push(entry.path());
        }
    }
    paths.sort();
    let loaded = exec.map(&paths, |p| -> Result<CorpusItem> {
        let bytes = fs::read(p).map_err(|e| Error::io(p, e))?;
        let name = p
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        Ok(CorpusItem {
            sequence: Sequence::from_bytes(name, &bytes),
            label: None,
            path: Some(p.clone()),
        })
    });
    let items = loaded.into_iter().collect::<Result<Vec<_>>>()?;
    let corpus = Corpus::new(Alphabet::Bytes, items)?;
    match labels {
        Some(map) => corpus.with_labels(map, true),
        None => Ok(corpus),
    }
}

/// One line of a corpus manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub path: Option<PathBuf>,
    pub length: usize,
    pub label: Option<String>,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub alphabet: String,
    pub items: Vec<ManifestEntry>,
}

fn sha256_hex(tokens: &[u32]) -> String {
    let mut hasher = Sha256::new();
    for &t in tokens {
        hasher.update(t.to_le_bytes());
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl Corpus {
    pub fn manifest(&self) -> CorpusManifest {
        CorpusManifest {
            alphabet: self.alphabet.name(),
            items: self
                .items
                .iter()
                .map(|i| ManifestEntry {
                    id: i.id().to_string(),
                    path: i.path.clone(),
                    length: i.sequence.len(),
                    label: i.label.clone(),
                    sha256: sha256_hex(i.sequence.tokens()),
                })
                .collect(),
        }
    }
}

pub fn write_manifest(manifest: &CorpusManifest, path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(manifest)?;
    fs::write(path, json).map_err(|e| Error::io(path, e))
}

pub fn read_manifest(path: &Path) -> Result<CorpusManifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Reloads the corpus a manifest describes, checking every checksum.
pub fn load_from_manifest(manifest: &CorpusManifest, policy: AmbiguityPolicy) -> Result<Corpus> {
    let alphabet = match manifest.alphabet.as_str() {
        "dna" => Alphabet::Dna,
        "bytes" => Alphabet::Bytes,
        other => {
            return Err(Error::InvalidArgument(format!(
                "manifest alphabet '{other}' cannot be reloaded from files"
            )))
        }
    };
    let mut fasta_cache: HashMap<PathBuf, Vec<Sequence>> = HashMap::new();
    let mut items = Vec::with_capacity(manifest.items.len());
    for entry in &manifest.items {
        let path = entry.path.clone().ok_or_else(|| {
            Error::InvalidArgument(format!("manifest entry {} has no path", entry.id))
        })?;
        let sequence = match alphabet {
            Alphabet::Dna => {
                if !fasta_cache.contains_key(&path) {
                    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                    fasta_cache.insert(path.clone(), parse_fasta(&text, policy, &path)?);
                }
                fasta_cache[&path]
                    .iter()
                    .find(|s| s.id() == entry.id)
                    .cloned()
                    .ok_or_else(|| Error::Malformed {
                        path: path.clone(),
                        reason: format!("record {} not found", entry.id),
                    })?
            }
            _ => {
                let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
                Sequence::from_bytes(entry.id.clone(), &bytes)
            }
        };
        if sha256_hex(sequence.tokens()) != entry.sha256 {
            return Err(Error::Malformed {
                path,
                reason: format!("checksum mismatch for {}", entry.id),
            });
        }
        items.push(CorpusItem {
            sequence,
            label: entry.label.clone(),
            path: Some(path),
        });
    }
    Corpus::new(alphabet, items)
}
