use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sequence::Sequence;

/// Target for a generated sequence. Entropy is normalized to base `|Σ|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropySpec {
    pub alphabet_size: u32,
    pub target_entropy: f64,
    pub length: usize,
    pub seed: u64,
}

/// Normalized entropy of the family `p₀ = p`, `pⱼ = (1 - p) / (|Σ| - 1)`.
pub fn normalized_entropy(p: f64, alphabet_size: u32) -> f64 {
    let sigma = f64::from(alphabet_size);
    let plogp = |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 };
    let rest = (1.0 - p) / (sigma - 1.0);
    -(plogp(p) + (sigma - 1.0) * plogp(rest)) / sigma.ln()
}

/// Solves for the heavy-symbol probability in `[1/|Σ|, 1]` by bisection.
pub fn heavy_symbol_probability(target: f64, alphabet_size: u32) -> Result<f64> {
    if alphabet_size < 2 {
        return Err(Error::InvalidArgument(
            "entropy targets need an alphabet of at least 2 symbols".into(),
        ));
    }
    if !(0.0..=1.0).contains(&target) {
        return Err(Error::InvalidArgument(format!(
            "target entropy {target} outside [0, 1]"
        )));
    }
    let (mut lo, mut hi) = (1.0 / f64::from(alphabet_size), 1.0);
    if target >= 1.0 {
        return Ok(lo);
    }
    if target <= 0.0 {
        return Ok(hi);
    }
    // Entropy falls as p grows.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if normalized_entropy(mid, alphabet_size) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// I.i.d. sample from the heavy-symbol family at the requested entropy.
pub fn gen_entropy_sequence(spec: &EntropySpec) -> Result<Sequence> {
    let p = heavy_symbol_probability(spec.target_entropy, spec.alphabet_size)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let others = spec.alphabet_size - 1;
    let tokens = (0..spec.length)
        .map(|_| {
            if rng.random::<f64>() < p {
                0
            } else {
                1 + rng.random_range(0..others)
            }
        })
        .collect();
    Sequence::new(
        format!("entropy-{}-{}", spec.target_entropy, spec.seed),
        tokens,
        spec.alphabet_size,
    )
}

/// Uniformly random sequence.
pub fn uniform_sequence(
    id: impl Into<String>,
    alphabet_size: u32,
    length: usize,
    seed: u64,
) -> Sequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tokens = (0..length)
        .map(|_| rng.random_range(0..alphabet_size))
        .collect();
    Sequence::new(id, tokens, alphabet_size).expect("tokens drawn inside the alphabet")
}

/// Plug-in unigram entropy normalized to base `|Σ|`.
pub fn empirical_entropy(seq: &Sequence) -> f64 {
    if seq.is_empty() || seq.alphabet_size() < 2 {
        return 0.0;
    }
    let mut counts = vec![0usize; seq.alphabet_size() as usize];
    for &t in seq.tokens() {
        counts[t as usize] += 1;
    }
    let n = seq.len() as f64;
    let h: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum();
    h / f64::from(seq.alphabet_size()).ln()
}
