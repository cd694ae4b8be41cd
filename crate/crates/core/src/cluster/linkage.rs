use super::{Dendrogram, DistanceMatrix};
use crate::error::{Error, Result};

fn check_size(d: &DistanceMatrix) -> Result<()> {
    if d.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "hierarchical clustering needs at least 2 items, got {}",
            d.len()
        )));
    }
    Ok(())
}

/// Single-linkage clustering with Sibson's SLINK pointer representation:
/// O(n²) time, O(n) working memory.
pub fn slink(d: &DistanceMatrix) -> Result<Dendrogram> {
    check_size(d)?;
    let n = d.len();
    let mut pi = vec![0usize; n];
    let mut lambda = vec![f64::INFINITY; n];
    let mut m = vec![0.0f64; n];

    for i in 0..n {
        pi[i] = i;
        lambda[i] = f64::INFINITY;
        for (j, mj) in m.iter_mut().enumerate().take(i) {
            *mj = d.get(j, i);
        }
        for j in 0..i {
            let p = pi[j];
            if lambda[j] >= m[j] {
                m[p] = m[p].min(lambda[j]);
                lambda[j] = m[j];
                pi[j] = i;
            } else {
                m[p] = m[p].min(m[j]);
            }
        }
        for j in 0..i {
            if lambda[j] >= lambda[pi[j]] {
                pi[j] = i;
            }
        }
    }

    // Every point but the last joins its pointer at height lambda.
    let steps = (0..n - 1).map(|j| (j, pi[j], lambda[j])).collect();
    Ok(Dendrogram::from_leaf_merges(d.labels().to_vec(), steps))
}

/// Average-linkage (UPGMA) clustering with the nearest-neighbor chain
/// algorithm: O(n²) time, O(n²) memory.
pub fn average_link(d: &DistanceMatrix) -> Result<Dendrogram> {
    check_size(d)?;
    let n = d.len();
    let mut dist: Vec<f64> = Vec::with_capacity(n * n);
    for i in 0..n {
        dist.extend((0..n).map(|j| d.get(i, j)));
    }
    let mut size = vec![1usize; n];
    let mut active = vec![true; n];
    let mut chain: Vec<usize> = Vec::with_capacity(n);
    let mut steps = Vec::with_capacity(n - 1);

    while steps.len() < n - 1 {
        if chain.is_empty() {
            chain.push(
                active
                    .iter()
                    .position(|&a| a)
                    .expect("an active cluster remains"),
            );
        }
        loop {
            let a = *chain.last().unwrap();
            let prev = (chain.len() >= 2).then(|| chain[chain.len() - 2]);
            // Prefer the previous chain element on ties so the chain terminates.
            let mut best = prev;
            let mut best_d = prev.map_or(f64::INFINITY, |p| dist[a * n + p]);
            for c in 0..n {
                if c != a && active[c] && dist[a * n + c] < best_d {
                    best = Some(c);
                    best_d = dist[a * n + c];
                }
            }
            let b = best.expect("at least two active clusters");
            if Some(b) == prev {
                chain.pop();
                chain.pop();
                let (keep, gone) = (a.min(b), a.max(b));
                steps.push((keep, gone, best_d));
                let (sk, sg) = (size[keep] as f64, size[gone] as f64);
                for x in 0..n {
                    if active[x] && x != keep && x != gone {
                        let v = (sk * dist[keep * n + x] + sg * dist[gone * n + x]) / (sk + sg);
                        dist[keep * n + x] = v;
                        dist[x * n + keep] = v;
                    }
                }
                size[keep] += size[gone];
                active[gone] = false;
                break;
            }
            chain.push(b);
        }
    }
    Ok(Dendrogram::from_leaf_merges(d.labels().to_vec(), steps))
}
