use super::NeighborResult;

/// Majority vote over a neighbor list.
#[derive(Debug, Clone, PartialEq)]
pub struct Vote {
    /// Most frequent label; ties go to the label of the nearer neighbor.
    pub predicted: String,
    /// Fraction of neighbors carrying the positive label.
    pub score: f64,
}

/// Votes with the labels of `neighbors`; `labels` is indexed by corpus id.
pub fn knn_vote(neighbors: &NeighborResult, labels: &[String], positive: &str) -> Vote {
    let mut tally: Vec<(&str, usize, usize)> = Vec::new();
    for (rank, &id) in neighbors.ids.iter().enumerate() {
        let label = labels[id].as_str();
        match tally.iter_mut().find(|(l, _, _)| *l == label) {
            Some(entry) => entry.1 += 1,
            None => tally.push((label, 1, rank)),
        }
    }
    let predicted = tally
        .iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.2.cmp(&a.2)))
        .map_or(String::new(), |(l, _, _)| l.to_string());
    let hits = neighbors
        .ids
        .iter()
        .filter(|&&id| labels[id] == positive)
        .count();
    let score = if neighbors.ids.is_empty() {
        0.0
    } else {
        hits as f64 / neighbors.ids.len() as f64
    };
    Vote { predicted, score }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn majority_and_score() {
        let labels: Vec<String> = ["benign", "malicious", "malicious", "benign"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let r = NeighborResult {
            ids: vec![1, 0, 2],
            distances: vec![0.1, 0.2, 0.3],
            evaluations: 3,
        };
        let v = knn_vote(&r, &labels, "malicious");
        assert_eq!(v.predicted, "malicious");
        assert!((v.score - 2.0 / 3.0).abs() < 1e-12);

        let tie = NeighborResult {
            ids: vec![3, 1],
            distances: vec![0.1, 0.2],
            evaluations: 2,
        };
        assert_eq!(knn_vote(&tie, &labels, "malicious").predicted, "benign");
    }
}
