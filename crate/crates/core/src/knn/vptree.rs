use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{check_query, Metric, NeighborResult, TopK};
use crate::error::Result;

/// Candidates examined per node when choosing a vantage point.
const VANTAGE_CANDIDATES: usize = 5;
/// Items sampled to estimate each candidate's distance variance.
const VARIANCE_SAMPLE: usize = 32;
/// Absorbs rounding when pruning with the triangle inequality.
const PRUNE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone)]
struct Node {
    item: usize,
    /// Median distance from the vantage point; inside holds `d < radius`.
    radius: f64,
    inside: Option<usize>,
    outside: Option<usize>,
}

/// Vantage-point tree for exact k-NN under any metric.
///
/// Each node picks, among a few random candidates, the vantage point whose
/// distances to a sample of the remaining items have the least variance.
pub struct VpTree<T, M> {
    items: Vec<T>,
    metric: M,
    nodes: Vec<Node>,
    root: Option<usize>,
    build_evaluations: usize,
}

impl<T: Sync, M: Metric<T>> VpTree<T, M> {
    pub fn build(items: Vec<T>, metric: M, seed: u64) -> Result<Self> {
        check_query(items.len(), 1)?;
        let mut tree = VpTree {
            items,
            metric,
            nodes: Vec::new(),
            root: None,
            build_evaluations: 0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ids: Vec<usize> = (0..tree.items.len()).collect();
        tree.root = tree.build_node(&mut ids, &mut rng);
        Ok(tree)
    }

    fn dist(&self, a: usize, b: usize) -> f64 {
        self.metric.distance(&self.items[a], &self.items[b])
    }

    fn choose_vantage(&mut self, ids: &[usize], rng: &mut ChaCha8Rng) -> usize {
        if ids.len() <= 2 {
            return 0;
        }
        let candidates = sample(rng, ids.len(), VANTAGE_CANDIDATES.min(ids.len()));
        let probe = sample(rng, ids.len(), VARIANCE_SAMPLE.min(ids.len()));
        let mut best = (f64::INFINITY, 0);
        for c in candidates.iter() {
            let ds: Vec<f64> = probe
                .iter()
                .filter(|&p| p != c)
                .map(|p| self.dist(ids[c], ids[p]))
                .collect();
            self.build_evaluations += ds.len();
            let mean = ds.iter().sum::<f64>() / ds.len() as f64;
            let var = ds.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / ds.len() as f64;
            if var < best.0 {
                best = (var, c);
            }
        }
        best.1
    }

    fn build_node(&mut self, ids: &mut [usize], rng: &mut ChaCha8Rng) -> Option<usize> {
        if ids.is_empty() {
            return None;
        }
        let v = self.choose_vantage(ids, rng);
        ids.swap(0, v);
        let vantage = ids[0];
        let rest = &mut ids[1..];
        let node = self.nodes.len();
        self.nodes.push(Node {
            item: vantage,
            radius: 0.0,
            inside: None,
            outside: None,
        });
        if rest.is_empty() {
            return Some(node);
        }
        let mut keyed: Vec<(f64, usize)> =
            rest.iter().map(|&i| (self.dist(vantage, i), i)).collect();
        self.build_evaluations += keyed.len();
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let radius = keyed[keyed.len() / 2].0;
        // Strictly-closer items go inside; everything at or beyond the median outside.
        let split = keyed.partition_point(|&(d, _)| d < radius);
        for (slot, &(_, i)) in rest.iter_mut().zip(&keyed) {
            *slot = i;
        }
        let (inner, outer) = rest.split_at_mut(split);
        let inside = self.build_node(inner, rng);
        let outside = self.build_node(outer, rng);
        let n = &mut self.nodes[node];
        n.radius = radius;
        n.inside = inside;
        n.outside = outside;
        Some(node)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[T] {
        &self.items
    }

    /// Distance evaluations spent while building.
    pub fn build_evaluations(&self) -> usize {
        self.build_evaluations
    }

    /// Exact k nearest neighbors of `query`.
    pub fn query(&self, query: &T, k: usize) -> Result<NeighborResult> {
        check_query(self.items.len(), k)?;
        let mut top = TopK::new(k);
        let mut evaluations = 0;
        // Each entry carries a lower bound on distances inside its subtree.
        let mut stack = vec![(self.root, 0.0f64)];
        while let Some((next, gap)) = stack.pop() {
            let Some(node) = next.map(|i| &self.nodes[i]) else {
                continue;
            };
            if gap > top.radius() + PRUNE_SLACK {
                continue;
            }
            let d = self.metric.distance(&self.items[node.item], query);
            evaluations += 1;
            top.push(node.item, d);
            let (near, far, far_gap) = if d < node.radius {
                (node.inside, node.outside, node.radius - d)
            } else {
                (node.outside, node.inside, d - node.radius)
            };
            // Far side first so the near side is explored first.
            if far.is_some() && far_gap <= top.radius() + PRUNE_SLACK {
                stack.push((far, far_gap.max(gap)));
            }
            stack.push((near, gap));
        }
        Ok(top.into_result(evaluations))
    }
}
