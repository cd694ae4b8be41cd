//! Desk-scale experiment harnesses: randomized property suite, random-file
//! distance grid, entropy sweep and a synthetic labeled byte corpus.

mod entropy;
mod grid;
mod synthetic;
mod theorems;

pub use entropy::{
    empirical_entropy, gen_entropy_sequence, heavy_symbol_probability, normalized_entropy,
    uniform_sequence, EntropySpec,
};
pub use grid::{
    entropy_sweep_experiment, grid_csv, random_grid_experiment, sweep_csv, GridConfig, GridRow,
    SweepConfig, SweepRow,
};
pub use synthetic::{synthetic_family_corpus, SyntheticConfig};
pub use theorems::{theorem_suite, CheckOutcome, Implementations, TheoremConfig, TheoremReport};

/// Deterministic per-job seed from a base seed and two coordinates.
pub(crate) fn derive_seed(base: u64, a: u64, b: u64) -> u64 {
    let mut x =
        base ^ a.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ b.wrapping_mul(0xc2b2_ae3d_27d4_eb4f);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}
