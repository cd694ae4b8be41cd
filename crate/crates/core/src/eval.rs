//! Clustering quality and classification metrics.

use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct VMeasure {
    pub homogeneity: f64,
    pub completeness: f64,
    pub v_measure: f64,
}

fn dense_ids<T: Eq + Hash>(xs: &[T]) -> (Vec<usize>, usize) {
    let mut map: HashMap<&T, usize> = HashMap::new();
    let ids = xs
        .iter()
        .map(|x| {
            let next = map.len();
            *map.entry(x).or_insert(next)
        })
        .collect();
    (ids, map.len())
}

fn entropy(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Homogeneity, completeness and V-measure of `predicted` against `truth`.
///
/// Natural-log entropies. Homogeneity is 1 when the classes have zero
/// entropy, completeness is 1 when the clusters do, and the V-measure is 0
/// when both scores are 0.
pub fn homogeneity_completeness_v<A, B>(truth: &[A], predicted: &[B]) -> Result<VMeasure>
where
    A: Eq + Hash,
    B: Eq + Hash,
{
    if truth.len() != predicted.len() {
        return Err(Error::InvalidArgument(format!(
            "{} truth labels for {} predictions",
            truth.len(),
            predicted.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::InvalidArgument("no items to score".into()));
    }
    let n = truth.len() as f64;
    let (classes, nc) = dense_ids(truth);
    let (clusters, nk) = dense_ids(predicted);
    let mut joint = vec![0usize; nc * nk];
    let mut class_counts = vec![0usize; nc];
    let mut cluster_counts = vec![0usize; nk];
    for (&c, &k) in classes.iter().zip(&clusters) {
        joint[c * nk + k] += 1;
        class_counts[c] += 1;
        cluster_counts[k] += 1;
    }
    let h_class = entropy(class_counts.iter().copied(), n);
    let h_cluster = entropy(cluster_counts.iter().copied(), n);
    // H(C|K) and H(K|C) from the contingency table.
    let mut h_class_given_cluster = 0.0;
    let mut h_cluster_given_class = 0.0;
    for c in 0..nc {
        for k in 0..nk {
            let nck = joint[c * nk + k];
            if nck == 0 {
                continue;
            }
            let p = nck as f64 / n;
            h_class_given_cluster -= p * (nck as f64 / cluster_counts[k] as f64).ln();
            h_cluster_given_class -= p * (nck as f64 / class_counts[c] as f64).ln();
        }
    }
    let homogeneity = if h_class == 0.0 {
        1.0
    } else {
        1.0 - h_class_given_cluster / h_class
    };
    let completeness = if h_cluster == 0.0 {
        1.0
    } else {
        1.0 - h_cluster_given_class / h_cluster
    };
    let v_measure = if homogeneity + completeness == 0.0 {
        0.0
    } else {
        2.0 * homogeneity * completeness / (homogeneity + completeness)
    };
    Ok(VMeasure {
        homogeneity: homogeneity.clamp(0.0, 1.0),
        completeness: completeness.clamp(0.0, 1.0),
        v_measure: v_measure.clamp(0.0, 1.0),
    })
}

/// Mean per-class recall over the classes present in `truth`.
pub fn balanced_accuracy<T: Eq + Hash>(truth: &[T], predicted: &[T]) -> Result<f64> {
    if truth.len() != predicted.len() {
        return Err(Error::InvalidArgument(format!(
            "{} truth labels for {} predictions",
            truth.len(),
            predicted.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::InvalidArgument("no classes present in truth".into()));
    }
    let mut per_class: HashMap<&T, (usize, usize)> = HashMap::new();
    for (t, p) in truth.iter().zip(predicted) {
        let e = per_class.entry(t).or_default();
        e.1 += 1;
        if t == p {
            e.0 += 1;
        }
    }
    let recall_sum: f64 = per_class
        .values()
        .map(|&(hit, total)| hit as f64 / total as f64)
        .sum();
    Ok(recall_sum / per_class.len() as f64)
}

/// Area under the ROC curve as the Mann-Whitney statistic with tied scores
/// counted as one half.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::InvalidArgument(format!(
            "{} scores for {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidArgument("NaN score".into()));
    }
    let positives = labels.iter().filter(|&&l| l).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::InvalidArgument(
            "AUC needs both classes present".into(),
        ));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Average ranks (1-based) over tie groups.
    let mut rank_sum_pos = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        let avg_rank = (start + 1 + end) as f64 / 2.0;
        let pos_in_group = order[start..end].iter().filter(|&&i| labels[i]).count();
        rank_sum_pos += avg_rank * pos_in_group as f64;
        start = end;
    }
    let (p, n) = (positives as f64, negatives as f64);
    Ok((rank_sum_pos - p * (p + 1.0) / 2.0) / (p * n))
}
