//! Slow reference implementations used only by tests. None of them share
//! code with the library.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SENTINEL: i64 = -1;

/// BWT by sorting every rotation of `tokens` + sentinel. The sentinel is -1.
pub fn naive_bwt(tokens: &[u32]) -> Vec<i64> {
    let mut s: Vec<i64> = tokens.iter().map(|&t| i64::from(t)).collect();
    s.push(SENTINEL);
    let n = s.len();
    let mut rots: Vec<Vec<i64>> = (0..n)
        .map(|i| s[i..].iter().chain(&s[..i]).copied().collect())
        .collect();
    rots.sort();
    rots.iter().map(|r| r[n - 1]).collect()
}

/// Dense first-order transition distribution of the naive BWT, skipping
/// pairs that touch the sentinel. Flat index is `cur + prev * sigma`.
pub fn dense_transitions(tokens: &[u32], sigma: usize) -> Vec<f64> {
    let b = naive_bwt(tokens);
    let mut counts = vec![0.0; sigma * sigma];
    for w in b.windows(2) {
        if w[0] != SENTINEL && w[1] != SENTINEL {
            counts[w[1] as usize + w[0] as usize * sigma] += 1.0;
        }
    }
    let total: f64 = counts.iter().sum();
    counts.iter().map(|c| c / total).collect()
}

pub fn hellinger(p: &[f64], q: &[f64]) -> f64 {
    let s: f64 = p
        .iter()
        .zip(q)
        .map(|(a, b)| (a.sqrt() - b.sqrt()).powi(2))
        .sum();
    (s / 2.0).sqrt()
}

/// EBWT source labels by materializing each rotation's periodic extension
/// to `2 * (|u| + |v|)` symbols and sorting. Ties put the shorter string
/// first, and `u` first when the lengths match.
pub fn naive_ebwt_labels(u: &[u32], v: &[u32]) -> Vec<char> {
    let reach = 2 * (u.len() + v.len());
    let extend =
        |s: &[u32], i: usize| -> Vec<u32> { (0..reach).map(|k| s[(i + k) % s.len()]).collect() };
    let rank = |own: usize, other: usize, is_u: bool| -> u8 {
        if own < other || (own == other && is_u) {
            0
        } else {
            1
        }
    };
    let mut all: Vec<(Vec<u32>, u8, char)> = Vec::new();
    for i in 0..u.len() {
        all.push((extend(u, i), rank(u.len(), v.len(), true), 'u'));
    }
    for j in 0..v.len() {
        all.push((extend(v, j), rank(v.len(), u.len(), false), 'v'));
    }
    all.sort();
    all.into_iter().map(|(_, _, c)| c).collect()
}

pub fn naive_ebwt_distance(u: &[u32], v: &[u32]) -> u64 {
    let labels = naive_ebwt_labels(u, v);
    labels.windows(2).filter(|w| w[0] == w[1]).count() as u64
}

/// LZ78 phrase set as explicit token strings.
pub fn naive_lz_set(tokens: &[u32]) -> HashSet<Vec<u32>> {
    let mut set = HashSet::new();
    let mut start = 0;
    for end in 1..=tokens.len() {
        let phrase = tokens[start..end].to_vec();
        if set.insert(phrase) {
            start = end;
        }
    }
    set
}

pub fn naive_lzjd(a: &[u32], b: &[u32]) -> f64 {
    let (x, y) = (naive_lz_set(a), naive_lz_set(b));
    let union = x.union(&y).count();
    if union == 0 {
        return 0.0;
    }
    1.0 - x.intersection(&y).count() as f64 / union as f64
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Linkage {
    Single,
    Average,
}

/// Agglomerative clustering by repeatedly scanning every cluster pair.
/// Returns each merge's height and the members of the merged cluster.
pub fn naive_linkage(d: &[Vec<f64>], linkage: Linkage) -> Vec<(f64, BTreeSet<usize>)> {
    let mut clusters: Vec<BTreeSet<usize>> = (0..d.len()).map(|i| BTreeSet::from([i])).collect();
    let mut out = Vec::new();
    while clusters.len() > 1 {
        let mut best = (f64::INFINITY, 0, 0);
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let pairs = clusters[a]
                    .iter()
                    .flat_map(|&i| clusters[b].iter().map(move |&j| (i, j)));
                let h = match linkage {
                    Linkage::Single => pairs.map(|(i, j)| d[i][j]).fold(f64::INFINITY, f64::min),
                    Linkage::Average => {
                        let n = (clusters[a].len() * clusters[b].len()) as f64;
                        pairs.map(|(i, j)| d[i][j]).sum::<f64>() / n
                    }
                };
                if h < best.0 {
                    best = (h, a, b);
                }
            }
        }
        let (h, a, b) = best;
        let merged: BTreeSet<usize> = clusters[a].union(&clusters[b]).copied().collect();
        clusters.remove(b);
        clusters.remove(a);
        clusters.push(merged.clone());
        out.push((h, merged));
    }
    out
}

/// Symmetric matrix with i.i.d. uniform entries and a zero diagonal.
#[allow(clippy::needless_range_loop)]
pub fn random_matrix(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let x: f64 = rng.random();
            d[i][j] = x;
            d[j][i] = x;
        }
    }
    d
}

/// Every distance, sorted by (distance, id), truncated to `k`.
pub fn sort_all_knn<T>(
    corpus: &[T],
    query: &T,
    k: usize,
    dist: impl Fn(&T, &T) -> f64,
) -> Vec<(f64, usize)> {
    let mut all: Vec<(f64, usize)> = corpus
        .iter()
        .enumerate()
        .map(|(i, x)| (dist(query, x), i))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    all.truncate(k);
    all
}

pub fn random_tokens(rng: &mut ChaCha8Rng, sigma: u32, len: usize) -> Vec<u32> {
    (0..len).map(|_| rng.random_range(0..sigma)).collect()
}
