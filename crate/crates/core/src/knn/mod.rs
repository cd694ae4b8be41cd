//! Exact and approximate k-nearest-neighbor search.
//!
//! [`knn_brute`] is the exact linear scan, [`VpTree`] an exact metric tree,
//! and [`ProjectionIndex`] a simplified random-projection index (not a full
//! Dynamic Continuous Index) that re-ranks its candidates by true distance.

mod classify;
mod projection;
mod vptree;

pub use classify::{knn_vote, Vote};
pub use projection::{EuclideanPoint, ProjectionIndex};
pub use vptree::VpTree;

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::embed::{sparse_sq_dist, BwmdEmbedding};
use crate::error::{Error, Result};
use crate::lzjd::{lzjd_distance, LzSet};

/// A distance function over items of type `T`.
pub trait Metric<T: ?Sized>: Sync {
    fn distance(&self, a: &T, b: &T) -> f64;
}

impl<T: ?Sized, F> Metric<T> for F
where
    F: Fn(&T, &T) -> f64 + Sync,
{
    fn distance(&self, a: &T, b: &T) -> f64 {
        self(a, b)
    }
}

/// BWMD between embeddings that share an alphabet.
#[derive(Debug, Clone, Copy, Default)]
pub struct BwmdMetric;

impl Metric<BwmdEmbedding> for BwmdMetric {
    fn distance(&self, a: &BwmdEmbedding, b: &BwmdEmbedding) -> f64 {
        debug_assert_eq!(a.alphabet_size(), b.alphabet_size());
        sparse_sq_dist(a.entries(), b.entries()).sqrt()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LzjdMetric;

impl Metric<LzSet> for LzjdMetric {
    fn distance(&self, a: &LzSet, b: &LzSet) -> f64 {
        lzjd_distance(a, b)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EuclideanMetric;

impl Metric<[f64]> for EuclideanMetric {
    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

impl Metric<Vec<f64>> for EuclideanMetric {
    fn distance(&self, a: &Vec<f64>, b: &Vec<f64>) -> f64 {
        Metric::<[f64]>::distance(self, a, b)
    }
}

/// The `k` nearest items, ascending by distance then id.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborResult {
    pub ids: Vec<usize>,
    pub distances: Vec<f64>,
    /// Distance evaluations spent answering the query.
    pub evaluations: usize,
}

/// Max-heap entry ordered by (distance, id); the worst candidate sits on top.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Candidate {
    pub(crate) distance: f64,
    pub(crate) id: usize,
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then(self.id.cmp(&other.id))
    }
}

/// Bounded set of the `k` best candidates seen so far.
pub(crate) struct TopK {
    k: usize,
    heap: BinaryHeap<Candidate>,
}

impl TopK {
    pub(crate) fn new(k: usize) -> Self {
        TopK {
            k,
            heap: BinaryHeap::with_capacity(k + 1),
        }
    }

    pub(crate) fn push(&mut self, id: usize, distance: f64) {
        let c = Candidate { distance, id };
        if self.heap.len() < self.k {
            self.heap.push(c);
        } else if let Some(top) = self.heap.peek() {
            if c < *top {
                self.heap.pop();
                self.heap.push(c);
            }
        }
    }

    /// Current search radius: the k-th best distance, or infinity.
    pub(crate) fn radius(&self) -> f64 {
        if self.heap.len() < self.k {
            f64::INFINITY
        } else {
            self.heap.peek().map_or(f64::INFINITY, |c| c.distance)
        }
    }

    pub(crate) fn into_result(self, evaluations: usize) -> NeighborResult {
        let sorted = self.heap.into_sorted_vec();
        NeighborResult {
            ids: sorted.iter().map(|c| c.id).collect(),
            distances: sorted.iter().map(|c| c.distance).collect(),
            evaluations,
        }
    }
}

pub(crate) fn check_query(corpus_len: usize, k: usize) -> Result<()> {
    if corpus_len == 0 {
        return Err(Error::InvalidArgument("empty corpus".into()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    Ok(())
}

/// Exact k-NN by linear scan.
pub fn knn_brute<T, M: Metric<T>>(
    corpus: &[T],
    query: &T,
    k: usize,
    metric: &M,
) -> Result<NeighborResult> {
    check_query(corpus.len(), k)?;
    let mut top = TopK::new(k);
    for (id, item) in corpus.iter().enumerate() {
        top.push(id, metric.distance(item, query));
    }
    Ok(top.into_result(corpus.len()))
}
