//! Corpus-level distance computation for the three supported metrics.

use crate::cluster::DistanceMatrix;
use crate::ebwt::{ebwt_distance, ebwt_distance_normalized};
use crate::embed::{bwmd_distance, embed, BwmdEmbedding};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::lzjd::{lz_set, lzjd_distance, LzSet};
use crate::sequence::Sequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Bwmd,
    /// Raw repetition count.
    Ebwt,
    /// Repetition count over `|u| + |v| - 2`.
    EbwtNormalized,
    /// Exact sets, or bottom-k sketches of the given size.
    Lzjd {
        sketch: Option<usize>,
    },
}

impl MetricKind {
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Bwmd => "bwmd",
            MetricKind::Ebwt | MetricKind::EbwtNormalized => "ebwt",
            MetricKind::Lzjd { .. } => "lzjd",
        }
    }

    /// Whether the metric is Euclidean in some embedding (projection indexing,
    /// k-means).
    pub fn is_euclidean(self) -> bool {
        self == MetricKind::Bwmd
    }
}

/// Per-item representation a metric works on.
pub enum Prepared<'a> {
    Bwmd(Vec<BwmdEmbedding>),
    Ebwt {
        sequences: Vec<&'a Sequence>,
        normalized: bool,
    },
    Lzjd(Vec<LzSet>),
}

/// Embeds every sequence; fails on the first degenerate one.
pub fn embed_all(sequences: &[&Sequence], exec: Execution) -> Result<Vec<BwmdEmbedding>> {
    exec.map(sequences, |s| embed(s)).into_iter().collect()
}

pub fn lz_sets(sequences: &[&Sequence], sketch: Option<usize>, exec: Execution) -> Vec<LzSet> {
    exec.map(sequences, |s| {
        let set = lz_set(s);
        match sketch {
            Some(k) => set.with_sketch(k),
            None => set,
        }
    })
}

impl<'a> Prepared<'a> {
    pub fn new(sequences: &[&'a Sequence], kind: MetricKind, exec: Execution) -> Result<Self> {
        if let Some(first) = sequences.first() {
            if let Some(s) = sequences
                .iter()
                .find(|s| s.alphabet_size() != first.alphabet_size())
            {
                return Err(Error::AlphabetMismatch {
                    left: first.alphabet_size(),
                    right: s.alphabet_size(),
                });
            }
        }
        Ok(match kind {
            MetricKind::Bwmd => Prepared::Bwmd(embed_all(sequences, exec)?),
            MetricKind::Ebwt | MetricKind::EbwtNormalized => Prepared::Ebwt {
                sequences: sequences.to_vec(),
                normalized: kind == MetricKind::EbwtNormalized,
            },
            MetricKind::Lzjd { sketch } => Prepared::Lzjd(lz_sets(sequences, sketch, exec)),
        })
    }

    pub fn len(&self) -> usize {
        match self {
            Prepared::Bwmd(v) => v.len(),
            Prepared::Ebwt { sequences, .. } => sequences.len(),
            Prepared::Lzjd(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn distance(&self, i: usize, j: usize) -> Result<f64> {
        match self {
            Prepared::Bwmd(v) => bwmd_distance(&v[i], &v[j]),
            Prepared::Ebwt {
                sequences,
                normalized: false,
            } => Ok(ebwt_distance(sequences[i], sequences[j])? as f64),
            Prepared::Ebwt {
                sequences,
                normalized: true,
            } => ebwt_distance_normalized(sequences[i], sequences[j]),
            Prepared::Lzjd(v) => Ok(lzjd_distance(&v[i], &v[j])),
        }
    }
}

/// Full pairwise matrix over `sequences`, filled row-parallel.
pub fn distance_matrix(
    ids: Vec<String>,
    sequences: &[&Sequence],
    kind: MetricKind,
    exec: Execution,
) -> Result<DistanceMatrix> {
    if ids.len() != sequences.len() {
        return Err(Error::InvalidArgument(
            "ids and sequences differ in length".into(),
        ));
    }
    let prepared = Prepared::new(sequences, kind, exec)?;
    DistanceMatrix::from_fn(ids, exec, |i, j| prepared.distance(i, j))
}

/// Pairwise BWMD matrix from precomputed embeddings.
pub fn embedding_matrix(
    ids: Vec<String>,
    embeddings: &[BwmdEmbedding],
    exec: Execution,
) -> Result<DistanceMatrix> {
    DistanceMatrix::from_fn(ids, exec, |i, j| {
        bwmd_distance(&embeddings[i], &embeddings[j])
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ebwt_matrix_of_worked_example() {
        let u = Sequence::from_letters("u", "bcaa").unwrap();
        let v = Sequence::from_letters("v", "ccbab").unwrap();
        let d = distance_matrix(
            vec!["u".into(), "v".into()],
            &[&u, &v],
            MetricKind::Ebwt,
            Execution::Parallel,
        )
        .unwrap();
        assert_eq!(d.get(0, 1), 3.0);
    }

    #[test]
    fn modes_agree() {
        let seqs: Vec<Sequence> = (0..12)
            .map(|i| {
                Sequence::new(
                    format!("s{i}"),
                    (0..40).map(|j| (j * (i + 3) % 7) as u32).collect(),
                    7,
                )
                .unwrap()
            })
            .collect();
        let refs: Vec<&Sequence> = seqs.iter().collect();
        let ids: Vec<String> = seqs.iter().map(|s| s.id().to_string()).collect();
        for kind in [
            MetricKind::Bwmd,
            MetricKind::EbwtNormalized,
            MetricKind::Lzjd { sketch: None },
        ] {
            let a = distance_matrix(ids.clone(), &refs, kind, Execution::Serial).unwrap();
            let b = distance_matrix(ids.clone(), &refs, kind, Execution::Parallel).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn alphabet_mismatch_is_rejected() {
        let a = Sequence::new("a", vec![0, 1, 0], 4).unwrap();
        let b = Sequence::new("b", vec![0, 1, 0], 256).unwrap();
        assert!(distance_matrix(
            vec!["a".into(), "b".into()],
            &[&a, &b],
            MetricKind::Bwmd,
            Execution::Serial
        )
        .is_err());
    }
}
