//! Extended BWT merge of two sequences and its repetition-count distance.
//!
//! Rotations of both inputs are interleaved in ω-order, i.e. each rotation is
//! compared as its infinite periodic extension. The distance sums, over every
//! maximal run of same-source rotations in the merged order, the run length
//! minus one.

use std::cmp::Ordering;

use crate::bwt::suffix_array;
use crate::error::{Error, Result};
use crate::sequence::{check_same_alphabet, Sequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    U,
    V,
}

/// Source label of every rotation in merged order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeTrace {
    labels: Vec<Source>,
}

impl MergeTrace {
    pub fn labels(&self) -> &[Source] {
        &self.labels
    }

    pub fn count(&self, source: Source) -> usize {
        self.labels.iter().filter(|&&s| s == source).count()
    }

    /// Run lengths of consecutive equal labels.
    pub fn runs(&self) -> Vec<usize> {
        let mut runs = Vec::new();
        let mut iter = self.labels.iter();
        let Some(mut prev) = iter.next() else {
            return runs;
        };
        let mut len = 1;
        for s in iter {
            if s == prev {
                len += 1;
            } else {
                runs.push(len);
                len = 1;
                prev = s;
            }
        }
        runs.push(len);
        runs
    }

    /// Sum of `max(run - 1, 0)` over all runs.
    pub fn distance(&self) -> u64 {
        self.runs()
            .iter()
            .map(|&r| r.saturating_sub(1) as u64)
            .sum()
    }

    /// Labels as a `u`/`v` string, e.g. `uuvvuvuvv`.
    pub fn render(&self) -> String {
        self.labels
            .iter()
            .map(|s| match s {
                Source::U => 'u',
                Source::V => 'v',
            })
            .collect()
    }
}

/// Rotation start positions of `tokens` in sorted order.
///
/// Uses the suffix array of the doubled string; rotations that are equal as
/// strings come out in an unspecified but deterministic order.
pub fn sorted_rotations(tokens: &[u32], alphabet_size: u32) -> Vec<usize> {
    let m = tokens.len();
    let doubled: Vec<u32> = tokens.iter().chain(tokens).copied().collect();
    suffix_array(&doubled, alphabet_size)
        .into_iter()
        .filter(|&p| p < m)
        .collect()
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// ω-order between rotation `i` of `u` and rotation `j` of `v`.
///
/// Two periodic words with periods `m` and `n` that agree on their first
/// `m + n - gcd(m, n)` symbols agree everywhere, which bounds the scan. When
/// the extensions are identical the rotation of the shorter input comes first,
/// and `u` wins when the lengths are equal.
pub fn omega_cmp(u: &[u32], i: usize, v: &[u32], j: usize) -> Ordering {
    let (m, n) = (u.len(), v.len());
    let limit = m + n - gcd(m, n);
    let (mut a, mut b) = (i, j);
    for _ in 0..limit {
        match u[a].cmp(&v[b]) {
            Ordering::Equal => {}
            ord => return ord,
        }
        a += 1;
        if a == m {
            a = 0;
        }
        b += 1;
        if b == n {
            b = 0;
        }
    }
    m.cmp(&n).then(Ordering::Less)
}

fn check_inputs(u: &Sequence, v: &Sequence) -> Result<()> {
    check_same_alphabet(u, v)?;
    if u.is_empty() || v.is_empty() {
        return Err(Error::Degenerate(
            "EBWT requires two non-empty sequences".into(),
        ));
    }
    Ok(())
}

/// Merges the sorted rotations of `u` and `v` and records their sources.
pub fn ebwt_merge(u: &Sequence, v: &Sequence) -> Result<MergeTrace> {
    check_inputs(u, v)?;
    let (ut, vt) = (u.tokens(), v.tokens());
    let ru = sorted_rotations(ut, u.alphabet_size());
    let rv = sorted_rotations(vt, v.alphabet_size());
    let mut labels = Vec::with_capacity(ru.len() + rv.len());
    let (mut a, mut b) = (0, 0);
    while a < ru.len() && b < rv.len() {
        if omega_cmp(ut, ru[a], vt, rv[b]) == Ordering::Less {
            labels.push(Source::U);
            a += 1;
        } else {
            labels.push(Source::V);
            b += 1;
        }
    }
    labels.extend(std::iter::repeat_n(Source::U, ru.len() - a));
    labels.extend(std::iter::repeat_n(Source::V, rv.len() - b));
    Ok(MergeTrace { labels })
}

/// Repetition-count EBWT distance between `u` and `v`.
pub fn ebwt_distance(u: &Sequence, v: &Sequence) -> Result<u64> {
    Ok(ebwt_merge(u, v)?.distance())
}

/// EBWT distance scaled by its maximum `|u| + |v| - 2`.
pub fn ebwt_distance_normalized(u: &Sequence, v: &Sequence) -> Result<f64> {
    check_inputs(u, v)?;
    let denom = u.len() + v.len() - 2;
    if denom == 0 {
        return Err(Error::Degenerate(
            "normalized EBWT needs |u| + |v| > 2".into(),
        ));
    }
    Ok(ebwt_distance(u, v)? as f64 / denom as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn letters(s: &str) -> Sequence {
        Sequence::from_letters("t", s).unwrap()
    }

    #[test]
    fn worked_example_trace() {
        let trace = ebwt_merge(&letters("bcaa"), &letters("ccbab")).unwrap();
        assert_eq!(trace.render(), "uuvvuvuvv");
        assert_eq!(trace.runs(), vec![2, 2, 1, 1, 1, 2]);
        assert_eq!(trace.distance(), 3);
        let d = ebwt_distance_normalized(&letters("bcaa"), &letters("ccbab")).unwrap();
        assert!((d - 3.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn repeated_symbol_is_maximal() {
        let trace = ebwt_merge(&letters("aaa"), &letters("aaaaa")).unwrap();
        assert_eq!(trace.render(), "uuuvvvvv");
        assert_eq!(trace.distance(), 6);
        assert_eq!(
            ebwt_distance_normalized(&letters("aaa"), &letters("aaaaa")).unwrap(),
            1.0
        );
    }

    #[test]
    fn disjoint_interleaved_alphabet() {
        let u = Sequence::new("u", vec![2, 4], 8).unwrap();
        let v = Sequence::new("v", vec![3, 5], 8).unwrap();
        assert_eq!(ebwt_merge(&u, &v).unwrap().render(), "uvuv");
        assert_eq!(ebwt_distance(&u, &v).unwrap(), 0);
        assert_eq!(ebwt_distance_normalized(&u, &v).unwrap(), 0.0);
    }

    #[test]
    fn errors() {
        let e = Sequence::new("e", vec![], 26).unwrap();
        assert!(ebwt_merge(&e, &letters("ab")).is_err());
        assert!(ebwt_distance_normalized(&letters("a"), &letters("b")).is_err());
        let dna = Sequence::new("d", vec![0, 1], 4).unwrap();
        assert!(matches!(
            ebwt_merge(&dna, &letters("ab")),
            Err(Error::AlphabetMismatch { .. })
        ));
    }

    #[test]
    fn equal_length_ties_put_u_first() {
        let trace = ebwt_merge(&letters("ab"), &letters("ba")).unwrap();
        assert_eq!(trace.render(), "uvuv");
    }
}
