use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{check_query, NeighborResult, TopK};
use crate::embed::{sparse_sq_dist, BwmdEmbedding};
use crate::error::{Error, Result};

/// A point in a Euclidean space that can be projected onto a direction.
pub trait EuclideanPoint: Sync {
    fn dimension(&self) -> usize;
    fn project(&self, direction: &[f64]) -> f64;
    fn euclidean(&self, other: &Self) -> f64;
}

impl EuclideanPoint for BwmdEmbedding {
    fn dimension(&self) -> usize {
        BwmdEmbedding::dimension(self)
    }

    fn project(&self, direction: &[f64]) -> f64 {
        self.dot_dense(direction)
    }

    fn euclidean(&self, other: &Self) -> f64 {
        sparse_sq_dist(self.entries(), other.entries()).sqrt()
    }
}

impl EuclideanPoint for Vec<f64> {
    fn dimension(&self) -> usize {
        self.len()
    }

    fn project(&self, direction: &[f64]) -> f64 {
        self.iter().zip(direction).map(|(a, b)| a * b).sum()
    }

    fn euclidean(&self, other: &Self) -> f64 {
        self.iter()
            .zip(other)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Simplified random-projection index with exact re-ranking.
///
/// Items are projected onto `m` random unit directions and kept sorted per
/// direction. A query gathers, in every direction, the `c * k` items whose
/// projections are closest to its own, then ranks the union of those
/// candidates by true Euclidean distance.
pub struct ProjectionIndex<T> {
    items: Vec<T>,
    directions: Vec<Vec<f64>>,
    projected: Vec<Vec<(f64, usize)>>,
}

impl<T: EuclideanPoint> ProjectionIndex<T> {
    pub fn build(items: Vec<T>, m: usize, seed: u64) -> Result<Self> {
        check_query(items.len(), 1)?;
        if m == 0 {
            return Err(Error::InvalidArgument(
                "need at least one projection".into(),
            ));
        }
        let dim = items[0].dimension();
        if items.iter().any(|x| x.dimension() != dim) {
            return Err(Error::InvalidArgument("items differ in dimension".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let directions: Vec<Vec<f64>> = (0..m).map(|_| unit_vector(dim, &mut rng)).collect();
        let projected = directions
            .iter()
            .map(|dir| {
                let mut col: Vec<(f64, usize)> = items
                    .iter()
                    .enumerate()
                    .map(|(i, x)| (x.project(dir), i))
                    .collect();
                col.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                col
            })
            .collect();
        Ok(ProjectionIndex {
            items,
            directions,
            projected,
        })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn projections(&self) -> usize {
        self.directions.len()
    }

    pub fn items(&self) -> &[T] {
        &self.items
    }

    /// Candidate ids for a query: the union over directions, sorted.
    pub fn candidates(&self, query: &T, budget: usize) -> Vec<usize> {
        let mut seen = vec![false; self.items.len()];
        for (dir, col) in self.directions.iter().zip(&self.projected) {
            let q = query.project(dir);
            let mut hi = col.partition_point(|&(p, _)| p < q);
            let mut lo = hi;
            for _ in 0..budget.min(col.len()) {
                let take_low = match (lo.checked_sub(1), hi < col.len()) {
                    (Some(l), true) => q - col[l].0 <= col[hi].0 - q,
                    (Some(_), false) => true,
                    (None, _) => false,
                };
                if take_low {
                    lo -= 1;
                    seen[col[lo].1] = true;
                } else {
                    seen[col[hi].1] = true;
                    hi += 1;
                }
            }
        }
        seen.iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(i, _)| i)
            .collect()
    }

    /// Top `k` by true distance among the `c * k` per-direction candidates.
    pub fn query(&self, query: &T, k: usize, c: usize) -> Result<NeighborResult> {
        check_query(self.items.len(), k)?;
        if c == 0 {
            return Err(Error::InvalidArgument(
                "candidate multiplier must be positive".into(),
            ));
        }
        if query.dimension() != self.items[0].dimension() {
            return Err(Error::InvalidArgument(
                "query dimension differs from the index".into(),
            ));
        }
        let candidates = self.candidates(query, c.saturating_mul(k));
        let mut top = TopK::new(k);
        for &id in &candidates {
            top.push(id, self.items[id].euclidean(query));
        }
        Ok(top.into_result(candidates.len()))
    }
}

fn unit_vector(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}
