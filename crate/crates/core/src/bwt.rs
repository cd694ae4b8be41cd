//! Burrows-Wheeler transform via suffix array construction.
//!
//! The transform appends a unique end marker that sorts before every alphabet
//! symbol and returns the last column of the sorted rotation matrix.

use crate::error::{Error, Result};
use crate::sequence::Sequence;

/// Largest input accepted by [`bwt_oracle`].
pub const ORACLE_MAX_LEN: usize = 10_000;

/// BWT of a sequence with exactly one end-marker occurrence.
///
/// The marker slot in `tokens` holds `alphabet_size`, which is never a valid
/// symbol; use [`BwtOutput::symbol`] to read positions as `Option`s.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BwtOutput {
    tokens: Vec<u32>,
    sentinel_index: usize,
    alphabet_size: u32,
}

impl BwtOutput {
    pub fn tokens(&self) -> &[u32] {
        &self.tokens
    }

    pub fn sentinel_index(&self) -> usize {
        self.sentinel_index
    }

    pub fn alphabet_size(&self) -> u32 {
        self.alphabet_size
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Symbol at `i`, or `None` for the end marker.
    pub fn symbol(&self, i: usize) -> Option<u32> {
        (i != self.sentinel_index).then(|| self.tokens[i])
    }

    /// Renders the output with `marker` for the end marker and `f` for symbols.
    pub fn render(&self, marker: char, f: impl Fn(u32) -> char) -> String {
        (0..self.len())
            .map(|i| self.symbol(i).map_or(marker, &f))
            .collect()
    }
}

/// Suffix array of `tokens` followed by an end marker smaller than every symbol.
///
/// Returns `tokens.len() + 1` starting positions; the first entry is always the
/// marker suffix at position `tokens.len()`. Prefix doubling with counting
/// sorts, O(n log n).
pub fn suffix_array(tokens: &[u32], alphabet_size: u32) -> Vec<usize> {
    let n = tokens.len() + 1;
    // Shift symbols up by one so the marker is 0.
    let mut rank: Vec<usize> = tokens
        .iter()
        .map(|&t| t as usize + 1)
        .chain(std::iter::once(0))
        .collect();
    let mut sa = counting_sort_by(
        &(0..n).collect::<Vec<_>>(),
        &rank,
        alphabet_size as usize + 1,
    );
    rerank(&sa, &mut rank, |a, b, r| r[a] == r[b]);
    let mut classes = rank[sa[n - 1]] + 1;

    let mut k = 1;
    let mut second = Vec::with_capacity(n);
    while classes < n {
        // Order by second key: suffixes without a k-offset partner come first.
        second.clear();
        second.extend(n.saturating_sub(k)..n);
        second.extend(sa.iter().filter(|&&p| p >= k).map(|&p| p - k));
        sa = counting_sort_by(&second, &rank, classes);
        let key2 = |i: usize, r: &[usize]| if i + k < n { r[i + k] + 1 } else { 0 };
        rerank(&sa, &mut rank, |a, b, r| {
            r[a] == r[b] && key2(a, r) == key2(b, r)
        });
        classes = rank[sa[n - 1]] + 1;
        k *= 2;
    }
    sa
}

fn counting_sort_by(order: &[usize], key: &[usize], buckets: usize) -> Vec<usize> {
    let mut counts = vec![0usize; buckets + 1];
    for &i in order {
        counts[key[i] + 1] += 1;
    }
    for b in 1..counts.len() {
        counts[b] += counts[b - 1];
    }
    let mut out = vec![0usize; order.len()];
    for &i in order {
        let slot = &mut counts[key[i]];
        out[*slot] = i;
        *slot += 1;
    }
    out
}

fn rerank(sa: &[usize], rank: &mut Vec<usize>, same: impl Fn(usize, usize, &[usize]) -> bool) {
    let mut next = vec![0usize; rank.len()];
    for w in 1..sa.len() {
        let (prev, cur) = (sa[w - 1], sa[w]);
        next[cur] = next[prev] + usize::from(!same(prev, cur, rank));
    }
    *rank = next;
}

/// Burrows-Wheeler transform of `seq` with an end marker.
pub fn bwt(seq: &Sequence) -> BwtOutput {
    let tokens = seq.tokens();
    let marker = seq.alphabet_size();
    let sa = suffix_array(tokens, marker);
    let mut out = Vec::with_capacity(sa.len());
    let mut sentinel_index = 0;
    for (row, &p) in sa.iter().enumerate() {
        if p == 0 {
            sentinel_index = row;
            out.push(marker);
        } else {
            out.push(tokens[p - 1]);
        }
    }
    BwtOutput {
        tokens: out,
        sentinel_index,
        alphabet_size: marker,
    }
}

/// Reference BWT that materializes and sorts every rotation explicitly.
///
/// Quadratic memory; inputs longer than [`ORACLE_MAX_LEN`] are rejected.
pub fn bwt_oracle(seq: &Sequence) -> Result<BwtOutput> {
    let n = seq.len();
    if n > ORACLE_MAX_LEN {
        return Err(Error::OracleInputTooLarge {
            len: n,
            max: ORACLE_MAX_LEN,
        });
    }
    // Marker is 0, symbols are shifted by one.
    let text: Vec<u32> = seq
        .tokens()
        .iter()
        .map(|&t| t + 1)
        .chain(std::iter::once(0))
        .collect();
    let mut rotations: Vec<Vec<u32>> = (0..text.len())
        .map(|i| text[i..].iter().chain(&text[..i]).copied().collect())
        .collect();
    rotations.sort();
    let marker = seq.alphabet_size();
    let mut sentinel_index = 0;
    let tokens = rotations
        .iter()
        .enumerate()
        .map(|(row, r)| match r[r.len() - 1] {
            0 => {
                sentinel_index = row;
                marker
            }
            t => t - 1,
        })
        .collect();
    Ok(BwtOutput {
        tokens,
        sentinel_index,
        alphabet_size: marker,
    })
}
