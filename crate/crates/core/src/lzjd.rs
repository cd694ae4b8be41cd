//! Lempel-Ziv Jaccard Distance.
//!
//! A sequence is reduced to the set of phrases produced by an LZ78-style
//! parse; substrings are stored as 64-bit fingerprints. Distances are one
//! minus the Jaccard similarity of the sets, optionally estimated from
//! bottom-k min-hash sketches.

use std::collections::HashSet;

use crate::sequence::Sequence;

/// Sketch size used when sketching is requested without an explicit size.
pub const DEFAULT_SKETCH_SIZE: usize = 1024;

const SEED: u64 = 0x6a09_e667_f3bc_c908;

#[inline]
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Fingerprint of a phrase extended by one token.
#[inline]
fn extend(state: u64, token: u32) -> u64 {
    splitmix64(state ^ (u64::from(token) + 1).wrapping_mul(0xff51_afd7_ed55_8ccd))
}

/// Fingerprint of a whole token string.
pub fn fingerprint(tokens: &[u32]) -> u64 {
    tokens.iter().fold(SEED, |h, &t| extend(h, t))
}

/// Set of LZ phrase fingerprints, with an optional bottom-k sketch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LzSet {
    hashes: HashSet<u64>,
    sketch: Option<Vec<u64>>,
}

impl LzSet {
    pub fn hashes(&self) -> &HashSet<u64> {
        &self.hashes
    }

    /// The `k` smallest fingerprints in ascending order, when sketched.
    pub fn sketch(&self) -> Option<&[u64]> {
        self.sketch.as_deref()
    }

    pub fn len(&self) -> usize {
        self.hashes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hashes.is_empty()
    }

    /// Adds a bottom-`k` sketch of the full set.
    pub fn with_sketch(mut self, k: usize) -> Self {
        let mut all: Vec<u64> = self.hashes.iter().copied().collect();
        all.sort_unstable();
        all.truncate(k);
        self.sketch = Some(all);
        self
    }
}

/// LZ78 parse: grow the current phrase until it is new, record it, restart.
///
/// A trailing phrase that is already in the set is dropped.
pub fn lz_set(seq: &Sequence) -> LzSet {
    let mut hashes = HashSet::new();
    let mut state = SEED;
    for &t in seq.tokens() {
        state = extend(state, t);
        if hashes.insert(state) {
            state = SEED;
        }
    }
    LzSet {
        hashes,
        sketch: None,
    }
}

/// `1 - |A ∩ B| / |A ∪ B|`; uses the sketches when both sides carry one.
///
/// Two empty sets are at distance 0.
pub fn lzjd_distance(a: &LzSet, b: &LzSet) -> f64 {
    match (&a.sketch, &b.sketch) {
        (Some(sa), Some(sb)) => 1.0 - sketch_similarity(sa, sb),
        _ => {
            let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
            let inter = small
                .hashes
                .iter()
                .filter(|h| large.hashes.contains(h))
                .count();
            let union = a.len() + b.len() - inter;
            if union == 0 {
                0.0
            } else {
                1.0 - inter as f64 / union as f64
            }
        }
    }
}

/// Bottom-k Jaccard estimate: among the `k` smallest values of the union of
/// both sketches, the fraction present in both.
fn sketch_similarity(a: &[u64], b: &[u64]) -> f64 {
    let k = a.len().max(b.len());
    if k == 0 {
        return 1.0;
    }
    let (mut i, mut j) = (0, 0);
    let (mut seen, mut shared) = (0, 0);
    while seen < k && (i < a.len() || j < b.len()) {
        match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x == y => {
                shared += 1;
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x < y => i += 1,
            (Some(_), Some(_)) => j += 1,
            (Some(_), None) => i += 1,
            (None, _) => j += 1,
        }
        seen += 1;
    }
    shared as f64 / seen as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(n: usize) -> Sequence {
        Sequence::new("a", vec![0; n], 1).unwrap()
    }

    #[test]
    fn parses_repeated_symbol() {
        assert_eq!(lz_set(&run(3)).len(), 2);
        assert_eq!(lz_set(&run(10)).len(), 4);
        assert!(lz_set(&run(0)).is_empty());
        let set = lz_set(&run(10));
        for n in 1..=4 {
            assert!(set.hashes().contains(&fingerprint(&vec![0; n])));
        }
    }

    #[test]
    fn distance_values() {
        let a = lz_set(&run(3));
        let b = lz_set(&run(10));
        assert_eq!(lzjd_distance(&a, &a), 0.0);
        assert_eq!(lzjd_distance(&a, &b), 0.5);
        let empty = lz_set(&run(0));
        assert_eq!(lzjd_distance(&empty, &empty), 0.0);
        assert_eq!(lzjd_distance(&empty, &a), 1.0);
        let x = lz_set(&Sequence::new("x", vec![0, 1, 0, 0, 1], 4).unwrap());
        let y = lz_set(&Sequence::new("y", vec![2, 3, 3, 2, 2], 4).unwrap());
        assert_eq!(lzjd_distance(&x, &y), 1.0);
    }

    #[test]
    fn sketch_holds_smallest_hashes() {
        let seq = Sequence::new("s", (0..500).map(|i| (i * 7 % 13) as u32).collect(), 13).unwrap();
        let set = lz_set(&seq).with_sketch(8);
        let mut all: Vec<u64> = set.hashes().iter().copied().collect();
        all.sort_unstable();
        assert_eq!(set.sketch().unwrap(), &all[..8]);
        let whole = lz_set(&seq).with_sketch(10_000);
        assert_eq!(whole.sketch().unwrap().len(), whole.len());
        assert_eq!(lzjd_distance(&whole, &whole), 0.0);
    }
}
