//! Labeled byte corpus with planted per-family motifs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, CorpusItem};
use crate::error::{Error, Result};
use crate::sequence::{Alphabet, Sequence};

use super::derive_seed;

const MOTIFS_PER_FAMILY: usize = 12;
const MOTIF_PROBABILITY: f64 = 0.8;
const MUTATION_RATE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticConfig {
    pub classes: usize,
    pub per_class: usize,
    pub min_len: usize,
    pub max_len: usize,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            classes: 20,
            per_class: 100,
            min_len: 2_000,
            max_len: 8_000,
            seed: 0,
        }
    }
}

fn random_bytes(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.random()).collect()
}

/// Each file interleaves lightly mutated copies of its family's motifs with
/// short runs of uniform filler. Files are labeled `family_XX`.
pub fn synthetic_family_corpus(config: &SyntheticConfig) -> Result<Corpus> {
    if config.classes == 0 || config.per_class == 0 {
        return Err(Error::InvalidArgument("empty synthetic corpus".into()));
    }
    if config.min_len < 2 || config.min_len > config.max_len {
        return Err(Error::InvalidArgument(format!(
            "bad length range {}..={}",
            config.min_len, config.max_len
        )));
    }
    let mut items = Vec::with_capacity(config.classes * config.per_class);
    for class in 0..config.classes {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, class as u64, 0));
        let motifs: Vec<Vec<u8>> = (0..MOTIFS_PER_FAMILY)
            .map(|_| {
                let len = rng.random_range(8..=40);
                random_bytes(&mut rng, len)
            })
            .collect();
        let label = format!("family_{class:02}");
        for file in 0..config.per_class {
            let mut rng =
                ChaCha8Rng::seed_from_u64(derive_seed(config.seed, class as u64, file as u64 + 1));
            let target = rng.random_range(config.min_len..=config.max_len);
            let mut bytes = Vec::with_capacity(target + 40);
            while bytes.len() < target {
                if rng.random_bool(MOTIF_PROBABILITY) {
                    let motif = &motifs[rng.random_range(0..motifs.len())];
                    bytes.extend(motif.iter().map(|&b| {
                        if rng.random_bool(MUTATION_RATE) {
                            rng.random()
                        } else {
                            b
                        }
                    }));
                } else {
                    let n = rng.random_range(1..=8);
                    bytes.extend(random_bytes(&mut rng, n));
                }
            }
            bytes.truncate(target);
            let id = format!("{label}_{file:04}");
            items.push(CorpusItem {
                sequence: Sequence::from_bytes(id, &bytes),
                label: Some(label.clone()),
                path: None,
            });
        }
    }
    Corpus::new(Alphabet::Bytes, items)
}
