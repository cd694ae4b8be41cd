//! k-means over BWMD embeddings.
//!
//! Points stay sparse; centroids are dense with a cached squared norm and a
//! support list, so point-centroid distances cost O(nnz(point)). Both variants
//! share k-means++ seeding, the update step, and empty-cluster repair, so
//! Hamerly's bound-pruned iterations produce the same labels as plain Lloyd.

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ClusterAssignment;
use crate::embed::{sparse_sq_dist, BwmdEmbedding};
use crate::error::{Error, Result};
use crate::exec::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KMeansVariant {
    Lloyd,
    #[default]
    Hamerly,
}

#[derive(Debug, Clone, Copy)]
pub struct KMeansConfig {
    pub k: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub variant: KMeansVariant,
    pub exec: Execution,
}

impl KMeansConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        KMeansConfig {
            k,
            seed,
            max_iter: 1000,
            variant: KMeansVariant::Hamerly,
            exec: Execution::default(),
        }
    }

    pub fn variant(mut self, variant: KMeansVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn exec(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }
}

#[derive(Debug, Clone)]
pub struct KMeansResult {
    pub assignment: ClusterAssignment,
    /// Dense centroids, one per cluster.
    pub centroids: Vec<Vec<f64>>,
    /// Sum of squared distances to the assigned centroids.
    pub inertia: f64,
    /// Update steps performed.
    pub iterations: usize,
    /// Inertia after each assignment pass (Lloyd only).
    pub inertia_history: Vec<f64>,
    /// Point-centroid distance evaluations, excluding seeding.
    pub distance_evaluations: usize,
    pub converged: bool,
}

struct Centroid {
    dense: Vec<f64>,
    support: Vec<u32>,
    sq_norm: f64,
}

impl Centroid {
    fn from_point(p: &BwmdEmbedding) -> Self {
        Centroid {
            dense: p.to_dense(),
            support: p.entries().iter().map(|&(i, _)| i).collect(),
            sq_norm: p.squared_norm(),
        }
    }

    fn sq_dist_to_centroid(&self, other: &Centroid) -> f64 {
        let dot: f64 = other
            .support
            .iter()
            .map(|&i| self.dense[i as usize] * other.dense[i as usize])
            .sum();
        (self.sq_norm + other.sq_norm - 2.0 * dot).max(0.0)
    }
}

struct Points<'a> {
    points: &'a [BwmdEmbedding],
    sq_norms: Vec<f64>,
}

impl Points<'_> {
    #[inline]
    fn sq_dist(&self, i: usize, c: &Centroid) -> f64 {
        (self.sq_norms[i] + c.sq_norm - 2.0 * self.points[i].dot_dense(&c.dense)).max(0.0)
    }

    #[inline]
    fn dist(&self, i: usize, c: &Centroid) -> f64 {
        self.sq_dist(i, c).sqrt()
    }

    /// Nearest and second-nearest distance; lowest index wins ties.
    fn nearest_two(&self, i: usize, cs: &[Centroid]) -> (usize, f64, f64) {
        let (mut best, mut d1, mut d2) = (0, f64::INFINITY, f64::INFINITY);
        for (j, c) in cs.iter().enumerate() {
            let d = self.dist(i, c);
            if d < d1 {
                d2 = d1;
                d1 = d;
                best = j;
            } else if d < d2 {
                d2 = d;
            }
        }
        (best, d1, d2)
    }
}

fn validate(points: &[BwmdEmbedding], k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    if k > points.len() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} exceeds the {} points",
            points.len()
        )));
    }
    let sigma = points[0].alphabet_size();
    if let Some(p) = points.iter().find(|p| p.alphabet_size() != sigma) {
        return Err(Error::AlphabetMismatch {
            left: sigma,
            right: p.alphabet_size(),
        });
    }
    Ok(())
}

/// k-means++ seeding: indices of the initial centers.
pub(crate) fn kmeans_plus_plus(
    points: &[BwmdEmbedding],
    k: usize,
    seed: u64,
    exec: Execution,
) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = points.len();
    let first = rng.random_range(0..n);
    let mut chosen = vec![first];
    let mut is_chosen = vec![false; n];
    is_chosen[first] = true;
    let mut d2 = exec.map(points, |p| {
        sparse_sq_dist(p.entries(), points[first].entries())
    });
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 {
                    pick = Some(i);
                    if target < w {
                        break;
                    }
                    target -= w;
                }
            }
            pick.expect("positive total has a positive weight")
        } else {
            // Only duplicates of existing centers remain.
            is_chosen.iter().position(|&c| !c).expect("k <= n")
        };
        is_chosen[next] = true;
        chosen.push(next);
        let fresh = exec.map(points, |p| {
            sparse_sq_dist(p.entries(), points[next].entries())
        });
        for (cur, new) in d2.iter_mut().zip(fresh) {
            *cur = cur.min(new);
        }
    }
    chosen
}

/// Recomputes centroids as member means, then reseeds empty clusters from the
/// points farthest from their centroids.
fn update_centroids(pts: &Points<'_>, labels: &[usize], k: usize, dim: usize) -> Vec<Centroid> {
    let mut sums = vec![vec![0.0f64; dim]; k];
    let mut counts = vec![0usize; k];
    let mut touched: Vec<Vec<bool>> = vec![vec![false; dim]; k];
    for (i, &l) in labels.iter().enumerate() {
        counts[l] += 1;
        for &(idx, w) in pts.points[i].entries() {
            sums[l][idx as usize] += w;
            touched[l][idx as usize] = true;
        }
    }
    let mut centroids: Vec<Centroid> = sums
        .into_iter()
        .zip(&counts)
        .zip(touched)
        .map(|((mut dense, &count), touched)| {
            let support: Vec<u32> = (0..dim as u32).filter(|&i| touched[i as usize]).collect();
            if count > 0 {
                let inv = 1.0 / count as f64;
                for &i in &support {
                    dense[i as usize] *= inv;
                }
            }
            let sq_norm = support.iter().map(|&i| dense[i as usize].powi(2)).sum();
            Centroid {
                dense,
                support,
                sq_norm,
            }
        })
        .collect();

    let empty: Vec<usize> = (0..k).filter(|&j| counts[j] == 0).collect();
    if !empty.is_empty() {
        let mut far: Vec<(f64, usize)> = labels
            .iter()
            .enumerate()
            .map(|(i, &l)| (pts.sq_dist(i, &centroids[l]), i))
            .collect();
        // Farthest first, lowest index on ties.
        far.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        for (j, &(_, i)) in empty.iter().zip(&far) {
            centroids[*j] = Centroid::from_point(&pts.points[i]);
        }
    }
    centroids
}

fn inertia(pts: &Points<'_>, labels: &[usize], cs: &[Centroid]) -> f64 {
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| pts.sq_dist(i, &cs[l]))
        .sum()
}

/// Clusters `points` into `config.k` groups.
pub fn kmeans(points: &[BwmdEmbedding], config: &KMeansConfig) -> Result<KMeansResult> {
    validate(points, config.k)?;
    let exec = config.exec;
    let dim = points[0].dimension();
    let pts = Points {
        points,
        sq_norms: points.iter().map(BwmdEmbedding::squared_norm).collect(),
    };
    let seeds = kmeans_plus_plus(points, config.k, config.seed, exec);
    let centroids: Vec<Centroid> = seeds
        .iter()
        .map(|&i| Centroid::from_point(&points[i]))
        .collect();
    match config.variant {
        KMeansVariant::Lloyd => lloyd(&pts, centroids, config, dim),
        KMeansVariant::Hamerly => hamerly(&pts, centroids, config, dim),
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    pts: &Points<'_>,
    labels: Vec<usize>,
    centroids: Vec<Centroid>,
    k: usize,
    iterations: usize,
    inertia_history: Vec<f64>,
    distance_evaluations: usize,
    converged: bool,
) -> Result<KMeansResult> {
    let total = inertia(pts, &labels, &centroids);
    Ok(KMeansResult {
        assignment: ClusterAssignment::new(labels, k)?,
        centroids: centroids.into_iter().map(|c| c.dense).collect(),
        inertia: total,
        iterations,
        inertia_history,
        distance_evaluations,
        converged,
    })
}

fn lloyd(
    pts: &Points<'_>,
    mut centroids: Vec<Centroid>,
    config: &KMeansConfig,
    dim: usize,
) -> Result<KMeansResult> {
    let n = pts.points.len();
    let k = config.k;
    let assign = |cs: &[Centroid]| config.exec.map_range(n, |i| pts.nearest_two(i, cs).0);
    let mut labels = assign(&centroids);
    let mut evals = n * k;
    let mut history = vec![inertia(pts, &labels, &centroids)];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iter {
        centroids = update_centroids(pts, &labels, k, dim);
        iterations += 1;
        let next = assign(&centroids);
        evals += n * k;
        history.push(inertia(pts, &next, &centroids));
        if next == labels {
            converged = true;
            break;
        }
        labels = next;
    }
    finish(
        pts, labels, centroids, k, iterations, history, evals, converged,
    )
}

#[derive(Clone, Copy)]
struct Bounds {
    label: usize,
    upper: f64,
    lower: f64,
}

/// Slack added to bound updates to absorb rounding in the distance arithmetic.
const BOUND_SLACK: f64 = 1e-12;

fn hamerly(
    pts: &Points<'_>,
    mut centroids: Vec<Centroid>,
    config: &KMeansConfig,
    dim: usize,
) -> Result<KMeansResult> {
    let n = pts.points.len();
    let k = config.k;
    let exec = config.exec;
    let mut state: Vec<Bounds> = exec.map_range(n, |i| {
        let (label, d1, d2) = pts.nearest_two(i, &centroids);
        Bounds {
            label,
            upper: d1,
            lower: d2,
        }
    });
    let evals = AtomicUsize::new(n * k);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < config.max_iter {
        let labels: Vec<usize> = state.iter().map(|b| b.label).collect();
        let next = update_centroids(pts, &labels, k, dim);
        iterations += 1;
        let moved: Vec<f64> = centroids
            .iter()
            .zip(&next)
            .map(|(a, b)| a.sq_dist_to_centroid(b).sqrt())
            .collect();
        centroids = next;

        // Largest and second-largest movement, for the lower-bound update.
        let (mut m1, mut m1_idx, mut m2) = (0.0f64, usize::MAX, 0.0f64);
        for (j, &m) in moved.iter().enumerate() {
            if m > m1 {
                m2 = m1;
                m1 = m;
                m1_idx = j;
            } else if m > m2 {
                m2 = m;
            }
        }
        // Half distance from each centroid to its nearest other centroid.
        let half_sep: Vec<f64> = exec.map_range(k, |j| {
            let nearest = (0..k)
                .filter(|&o| o != j)
                .map(|o| centroids[j].sq_dist_to_centroid(&centroids[o]))
                .fold(f64::INFINITY, f64::min);
            0.5 * nearest.sqrt() - BOUND_SLACK
        });

        let changed = AtomicUsize::new(0);
        exec.for_each_mut(&mut state, |i, b| {
            let a = b.label;
            b.upper += moved[a] + BOUND_SLACK;
            b.lower -= if a == m1_idx { m2 } else { m1 } + BOUND_SLACK;
            let bound = half_sep[a].max(b.lower);
            if b.upper <= bound {
                return;
            }
            b.upper = pts.dist(i, &centroids[a]);
            evals.fetch_add(1, Ordering::Relaxed);
            if b.upper <= bound {
                return;
            }
            let (label, d1, d2) = pts.nearest_two(i, &centroids);
            evals.fetch_add(k, Ordering::Relaxed);
            if label != a {
                changed.fetch_add(1, Ordering::Relaxed);
            }
            *b = Bounds {
                label,
                upper: d1,
                lower: d2,
            };
        });
        if changed.into_inner() == 0 {
            converged = true;
            break;
        }
    }
    let labels = state.iter().map(|b| b.label).collect();
    finish(
        pts,
        labels,
        centroids,
        k,
        iterations,
        Vec::new(),
        evals.into_inner(),
        converged,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(entries: &[(u32, f64)]) -> BwmdEmbedding {
        BwmdEmbedding::from_parts(entries.to_vec(), 4, 10).unwrap()
    }

    #[test]
    fn rejects_bad_k() {
        let pts = vec![point(&[(0, 0.5)])];
        assert!(kmeans(&pts, &KMeansConfig::new(0, 1)).is_err());
        assert!(kmeans(&pts, &KMeansConfig::new(2, 1)).is_err());
    }

    #[test]
    fn k_equals_n_gives_singletons() {
        let pts: Vec<_> = (0..6).map(|i| point(&[(i, 0.7), (15, 0.1)])).collect();
        for variant in [KMeansVariant::Lloyd, KMeansVariant::Hamerly] {
            let r = kmeans(&pts, &KMeansConfig::new(6, 3).variant(variant)).unwrap();
            assert_eq!(r.assignment.non_empty(), 6);
            assert!(r.inertia.abs() < 1e-12);
        }
    }

    #[test]
    fn separates_two_blobs() {
        let mut pts = Vec::new();
        for i in 0..10 {
            let jitter = 0.01 * f64::from(i);
            pts.push(point(&[(0, 0.7 - jitter), (1, 0.1 + jitter)]));
            pts.push(point(&[(14, 0.7 - jitter), (15, 0.1 + jitter)]));
        }
        let r = kmeans(&pts, &KMeansConfig::new(2, 11)).unwrap();
        let l = r.assignment.labels();
        assert!(r.converged);
        for i in (0..20).step_by(2) {
            assert_eq!(l[i], l[0]);
            assert_eq!(l[i + 1], l[1]);
        }
        assert_ne!(l[0], l[1]);
    }

    #[test]
    fn duplicates_still_seed() {
        let pts: Vec<_> = (0..4).map(|_| point(&[(3, 0.7)])).collect();
        let r = kmeans(&pts, &KMeansConfig::new(3, 0)).unwrap();
        assert_eq!(r.assignment.k(), 3);
    }
}
