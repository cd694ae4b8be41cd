//! BWMD embedding: square-rooted first-order Markov transition frequencies of
//! the BWT output, scaled so that Euclidean distance equals Hellinger distance.

use crate::bwt::bwt;
use crate::error::{Error, Result};
use crate::sequence::Sequence;

/// Alphabets up to this many squared entries are counted with a dense table.
const DENSE_COUNT_LIMIT: u64 = 1 << 22;

/// Sparse embedding; `entries` are sorted by index with strictly positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct BwmdEmbedding {
    entries: Vec<(u32, f64)>,
    alphabet_size: u32,
    source_length: usize,
}

impl BwmdEmbedding {
    /// Builds an embedding from raw parts, validating ordering and weights.
    pub fn from_parts(
        entries: Vec<(u32, f64)>,
        alphabet_size: u32,
        source_length: usize,
    ) -> Result<Self> {
        let dim = u64::from(alphabet_size) * u64::from(alphabet_size);
        let sorted = entries.windows(2).all(|w| w[0].0 < w[1].0);
        let in_range = entries
            .iter()
            .all(|&(i, w)| u64::from(i) < dim && w > 0.0 && w.is_finite());
        if !sorted || !in_range {
            return Err(Error::InvalidArgument(
                "embedding entries must be sorted, in range and positive".into(),
            ));
        }
        Ok(BwmdEmbedding {
            entries,
            alphabet_size,
            source_length,
        })
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn alphabet_size(&self) -> u32 {
        self.alphabet_size
    }

    pub fn source_length(&self) -> usize {
        self.source_length
    }

    /// Embedding dimension `|Σ|²`.
    pub fn dimension(&self) -> usize {
        self.alphabet_size as usize * self.alphabet_size as usize
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn squared_norm(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w * w).sum()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension()];
        for &(i, w) in &self.entries {
            out[i as usize] = w;
        }
        out
    }

    /// Dot product with a dense vector of length [`dimension`](Self::dimension).
    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.entries
            .iter()
            .map(|&(i, w)| w * dense[i as usize])
            .sum()
    }
}

/// Flat transition index for previous symbol `prev` and current symbol `cur`.
#[inline]
pub fn transition_index(prev: u32, cur: u32, alphabet_size: u32) -> u32 {
    cur + prev * alphabet_size
}

/// Transition counts of the BWT output, skipping any pair that touches the
/// end marker. Returned sorted by flat index.
pub fn transition_counts(seq: &Sequence) -> Vec<(u32, u64)> {
    let out = bwt(seq);
    let sigma = seq.alphabet_size();
    let s = out.sentinel_index();
    let tokens = out.tokens();
    let pairs = (1..tokens.len())
        .filter(|&i| i != s && i - 1 != s)
        .map(|i| transition_index(tokens[i - 1], tokens[i], sigma));

    let dim = u64::from(sigma) * u64::from(sigma);
    if dim <= DENSE_COUNT_LIMIT {
        let mut counts = vec![0u64; dim as usize];
        for idx in pairs {
            counts[idx as usize] += 1;
        }
        counts
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c > 0)
            .map(|(i, c)| (i as u32, c))
            .collect()
    } else {
        let mut flat: Vec<u32> = pairs.collect();
        flat.sort_unstable();
        let mut counts: Vec<(u32, u64)> = Vec::new();
        for idx in flat {
            match counts.last_mut() {
                Some((last, c)) if *last == idx => *c += 1,
                _ => counts.push((idx, 1)),
            }
        }
        counts
    }
}

/// Embeds `seq` into the BWMD feature space.
pub fn embed(seq: &Sequence) -> Result<BwmdEmbedding> {
    if seq.len() < 2 {
        return Err(Error::Degenerate(format!(
            "sequence '{}' has {} tokens; at least 2 are needed",
            seq.id(),
            seq.len()
        )));
    }
    let counts = transition_counts(seq);
    let total: u64 = counts.iter().map(|&(_, c)| c).sum();
    if total == 0 {
        return Err(Error::Degenerate(format!(
            "sequence '{}' has no transitions away from the end marker",
            seq.id()
        )));
    }
    let total = total as f64;
    let entries = counts
        .into_iter()
        .map(|(i, c)| (i, (c as f64 / total).sqrt() / std::f64::consts::SQRT_2))
        .collect();
    Ok(BwmdEmbedding {
        entries,
        alphabet_size: seq.alphabet_size(),
        source_length: seq.len(),
    })
}

/// Euclidean distance between two embeddings via a sorted merge.
pub fn bwmd_distance(a: &BwmdEmbedding, b: &BwmdEmbedding) -> Result<f64> {
    if a.alphabet_size != b.alphabet_size {
        return Err(Error::AlphabetMismatch {
            left: a.alphabet_size,
            right: b.alphabet_size,
        });
    }
    Ok(sparse_sq_dist(&a.entries, &b.entries).sqrt())
}

pub(crate) fn sparse_sq_dist(a: &[(u32, f64)], b: &[(u32, f64)]) -> f64 {
    let (mut i, mut j) = (0, 0);
    let mut acc = 0.0;
    while i < a.len() && j < b.len() {
        let (ia, wa) = a[i];
        let (ib, wb) = b[j];
        if ia == ib {
            let d = wa - wb;
            acc += d * d;
            i += 1;
            j += 1;
        } else if ia < ib {
            acc += wa * wa;
            i += 1;
        } else {
            acc += wb * wb;
            j += 1;
        }
    }
    acc += a[i..].iter().map(|&(_, w)| w * w).sum::<f64>();
    acc += b[j..].iter().map(|&(_, w)| w * w).sum::<f64>();
    acc
}

/// Hellinger distance between two discrete distributions on the same support.
pub fn hellinger(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::InvalidArgument(format!(
            "support sizes differ: {} vs {}",
            p.len(),
            q.len()
        )));
    }
    for dist in [p, q] {
        let sum: f64 = dist.iter().sum();
        if (sum - 1.0).abs() > 1e-9 || dist.iter().any(|&x| x < 0.0) {
            return Err(Error::NotNormalized { sum });
        }
    }
    let s: f64 = p
        .iter()
        .zip(q)
        .map(|(&a, &b)| (a.sqrt() - b.sqrt()).powi(2))
        .sum();
    Ok(s.sqrt() / std::f64::consts::SQRT_2)
}
