//! Hierarchical and k-means clustering.

mod export;
mod kmeans;
mod linkage;

pub use export::{assignment_csv, dendrogram_dot, dendrogram_newick};
pub use kmeans::{kmeans, KMeansConfig, KMeansResult, KMeansVariant};
pub use linkage::{average_link, slink};

use crate::error::{Error, Result};
use crate::exec::Execution;

/// Symmetric pairwise distances stored as a condensed upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
    labels: Vec<String>,
}

#[inline]
fn condensed_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    n * i - i * (i + 1) / 2 + (j - i - 1)
}

impl DistanceMatrix {
    /// Fills the matrix with `f(i, j)` for every `i < j`, row-parallel.
    pub fn from_fn<F>(labels: Vec<String>, exec: Execution, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> Result<f64> + Sync + Send,
    {
        let n = labels.len();
        let rows = exec.map_range(n, |i| {
            ((i + 1)..n).map(|j| f(i, j)).collect::<Result<Vec<f64>>>()
        });
        let mut values = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for row in rows {
            values.extend(row?);
        }
        Self::from_condensed(labels, values)
    }

    pub fn from_condensed(labels: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let n = labels.len();
        if values.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::InvalidArgument(format!(
                "{} condensed values do not fit {n} items",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "distances must be finite and non-negative, got {v}"
            )));
        }
        Ok(DistanceMatrix { n, values, labels })
    }

    /// Builds from a full square matrix, checking symmetry and a zero diagonal.
    pub fn from_square(labels: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let n = labels.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument(
                "matrix shape does not match labels".into(),
            ));
        }
        let mut values = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for (i, row) in rows.iter().enumerate() {
            if row[i] != 0.0 {
                return Err(Error::InvalidArgument(format!("non-zero diagonal at {i}")));
            }
            for (j, &x) in row.iter().enumerate().skip(i + 1) {
                if x != rows[j][i] {
                    return Err(Error::InvalidArgument(format!("asymmetric at ({i}, {j})")));
                }
                values.push(x);
            }
        }
        Self::from_condensed(labels, values)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn condensed(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => self.values[condensed_index(self.n, i, j)],
            std::cmp::Ordering::Greater => self.values[condensed_index(self.n, j, i)],
        }
    }
}

/// One agglomeration step. Leaves are nodes `0..n`; merge `i` creates node `n + i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub id: usize,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    merges: Vec<Merge>,
    leaf_labels: Vec<String>,
}

impl Dendrogram {
    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn leaf_labels(&self) -> &[String] {
        &self.leaf_labels
    }

    pub fn leaves(&self) -> usize {
        self.leaf_labels.len()
    }

    pub fn heights(&self) -> Vec<f64> {
        self.merges.iter().map(|m| m.height).collect()
    }

    /// Builds a dendrogram from merges between clusters named by any member
    /// leaf. Merges are replayed in ascending height (stable for ties).
    pub(crate) fn from_leaf_merges(
        leaf_labels: Vec<String>,
        mut steps: Vec<(usize, usize, f64)>,
    ) -> Self {
        let n = leaf_labels.len();
        steps.sort_by(|a, b| a.2.total_cmp(&b.2));
        let mut uf = UnionFind::new(n);
        let mut node_of_root: Vec<usize> = (0..n).collect();
        let mut size_of_root = vec![1usize; n];
        let mut merges = Vec::with_capacity(n.saturating_sub(1));
        for (a, b, height) in steps {
            let (ra, rb) = (uf.find(a), uf.find(b));
            let (na, nb) = (node_of_root[ra], node_of_root[rb]);
            let size = size_of_root[ra] + size_of_root[rb];
            let root = uf.union(ra, rb);
            let id = n + merges.len();
            node_of_root[root] = id;
            size_of_root[root] = size;
            merges.push(Merge {
                left: na.min(nb),
                right: na.max(nb),
                height,
                id,
                size,
            });
        }
        Dendrogram {
            merges,
            leaf_labels,
        }
    }
}

/// Flat clustering: `labels[i]` is the cluster of item `i`, in `0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    labels: Vec<usize>,
    k: usize,
}

impl ClusterAssignment {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::InvalidArgument(format!(
                "cluster id {bad} not below k = {k}"
            )));
        }
        Ok(ClusterAssignment { labels, k })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of clusters that actually hold at least one item.
    pub fn non_empty(&self) -> usize {
        let mut seen = vec![false; self.k];
        self.labels.iter().for_each(|&l| seen[l] = true);
        seen.into_iter().filter(|&s| s).count()
    }
}

/// Cuts after the first `n - k` merges, giving exactly `k` clusters numbered by
/// first appearance.
pub fn cut_dendrogram(dend: &Dendrogram, k: usize) -> Result<ClusterAssignment> {
    let n = dend.leaves();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("k = {k} outside 1..={n}")));
    }
    let mut uf = UnionFind::new(n);
    // Track a representative leaf for every node id.
    let mut leaf_of_node: Vec<usize> = (0..n).collect();
    for m in &dend.merges[..n - k] {
        let (a, b) = (leaf_of_node[m.left], leaf_of_node[m.right]);
        uf.union(a, b);
        leaf_of_node.push(a);
    }
    let mut id_of_root = vec![usize::MAX; n];
    let mut next = 0;
    let labels = (0..n)
        .map(|i| {
            let r = uf.find(i);
            if id_of_root[r] == usize::MAX {
                id_of_root[r] = next;
                next += 1;
            }
            id_of_root[r]
        })
        .collect();
    ClusterAssignment::new(labels, k)
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Joins the sets of two roots and returns the new root.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> usize {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return a;
        }
        let (hi, lo) = if self.rank[a] >= self.rank[b] {
            (a, b)
        } else {
            (b, a)
        };
        self.parent[lo] = hi;
        if self.rank[hi] == self.rank[lo] {
            self.rank[hi] += 1;
        }
        hi
    }
}
