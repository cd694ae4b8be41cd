use super::{derive_seed, gen_entropy_sequence, uniform_sequence, EntropySpec};
use crate::ebwt::ebwt_distance_normalized;
use crate::embed::{bwmd_distance, embed};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fmt::sig12;
use crate::lzjd::{lz_set, lzjd_distance};
use crate::sequence::Sequence;

/// Longest sequence for which the EBWT column is computed.
pub const EBWT_MAX_LEN: usize = 100_000;

#[derive(Debug, Clone)]
pub struct GridConfig {
    pub alphabet_size: u32,
    pub lengths: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub lzjd_sketch: Option<usize>,
    pub exec: Execution,
}

impl GridConfig {
    pub fn new(lengths: Vec<usize>, trials: usize, seed: u64) -> Self {
        GridConfig {
            alphabet_size: 32,
            lengths,
            trials,
            seed,
            lzjd_sketch: None,
            exec: Execution::default(),
        }
    }
}

/// Mean distances between random sequences of lengths `len_x` and `len_y`.
/// `ebwt` is NaN when either length exceeds [`EBWT_MAX_LEN`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRow {
    pub len_x: usize,
    pub len_y: usize,
    pub ebwt: f64,
    pub bwmd: f64,
    pub lzjd: f64,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub alphabet_size: u32,
    pub length: usize,
    pub targets: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub lzjd_sketch: Option<usize>,
    pub exec: Execution,
}

impl SweepConfig {
    pub fn new(length: usize, targets: Vec<f64>, trials: usize, seed: u64) -> Self {
        SweepConfig {
            alphabet_size: 32,
            length,
            targets,
            trials,
            seed,
            lzjd_sketch: None,
            exec: Execution::default(),
        }
    }
}

/// Mean distances between a uniform sequence and one of entropy `entropy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub entropy: f64,
    pub ebwt: f64,
    pub bwmd: f64,
    pub lzjd: f64,
}

fn three_distances(x: &Sequence, y: &Sequence, sketch: Option<usize>) -> Result<[f64; 3]> {
    let ebwt = if x.len() <= EBWT_MAX_LEN && y.len() <= EBWT_MAX_LEN {
        ebwt_distance_normalized(x, y)?
    } else {
        f64::NAN
    };
    let bwmd = bwmd_distance(&embed(x)?, &embed(y)?)?;
    let (mut a, mut b) = (lz_set(x), lz_set(y));
    if let Some(k) = sketch {
        a = a.with_sketch(k);
        b = b.with_sketch(k);
    }
    Ok([ebwt, bwmd, lzjd_distance(&a, &b)])
}

fn mean_columns(samples: &[[f64; 3]]) -> [f64; 3] {
    let n = samples.len() as f64;
    let mut out = [0.0; 3];
    for s in samples {
        for c in 0..3 {
            out[c] += s[c];
        }
    }
    out.map(|v| v / n)
}

/// Every ordered pair of lengths, `trials` random pairs each.
pub fn random_grid_experiment(config: &GridConfig) -> Result<Vec<GridRow>> {
    if config.trials == 0 {
        return Ok(Vec::new());
    }
    if let Some(&l) = config.lengths.iter().find(|&&l| l < 3) {
        return Err(Error::InvalidArgument(format!(
            "grid length {l} is below 3"
        )));
    }
    let pairs: Vec<(usize, usize)> = config
        .lengths
        .iter()
        .flat_map(|&x| config.lengths.iter().map(move |&y| (x, y)))
        .collect();
    let trials = config.trials;
    let jobs = config.exec.map_range(pairs.len() * trials, |job| {
        let (p, t) = (job / trials, job % trials);
        let (lx, ly) = pairs[p];
        let sx = derive_seed(config.seed, 2 * p as u64, t as u64);
        let sy = derive_seed(config.seed, 2 * p as u64 + 1, t as u64);
        let x = uniform_sequence("x", config.alphabet_size, lx, sx);
        let y = uniform_sequence("y", config.alphabet_size, ly, sy);
        three_distances(&x, &y, config.lzjd_sketch)
    });
    let samples = jobs.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(pairs
        .iter()
        .zip(samples.chunks(trials))
        .map(|(&(len_x, len_y), chunk)| {
            let [ebwt, bwmd, lzjd] = mean_columns(chunk);
            GridRow {
                len_x,
                len_y,
                ebwt,
                bwmd,
                lzjd,
            }
        })
        .collect())
}

/// Distance from a uniform sequence to sequences of decreasing entropy.
pub fn entropy_sweep_experiment(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    if config.trials == 0 {
        return Ok(Vec::new());
    }
    let trials = config.trials;
    let jobs = config.exec.map_range(config.targets.len() * trials, |job| {
        let (ti, t) = (job / trials, job % trials);
        let primary = uniform_sequence(
            "primary",
            config.alphabet_size,
            config.length,
            derive_seed(config.seed, 2 * ti as u64, t as u64),
        );
        let secondary = gen_entropy_sequence(&EntropySpec {
            alphabet_size: config.alphabet_size,
            target_entropy: config.targets[ti],
            length: config.length,
            seed: derive_seed(config.seed, 2 * ti as u64 + 1, t as u64),
        })?;
        three_distances(&primary, &secondary, config.lzjd_sketch)
    });
    let samples = jobs.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(config
        .targets
        .iter()
        .zip(samples.chunks(trials))
        .map(|(&entropy, chunk)| {
            let [ebwt, bwmd, lzjd] = mean_columns(chunk);
            SweepRow {
                entropy,
                ebwt,
                bwmd,
                lzjd,
            }
        })
        .collect())
}

fn cell(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        sig12(x)
    }
}

/// CSV with columns `len_x,len_y,EBWT,BWMD,LZJD`; skipped EBWT cells are empty.
pub fn grid_csv(rows: &[GridRow]) -> String {
    let mut out = String::from("len_x,len_y,EBWT,BWMD,LZJD\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.len_x,
            r.len_y,
            cell(r.ebwt),
            cell(r.bwmd),
            cell(r.lzjd)
        ));
    }
    out
}

/// CSV with columns `Entropy,EBWT,BWMD,LZJD`.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("Entropy,EBWT,BWMD,LZJD\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            sig12(r.entropy),
            cell(r.ebwt),
            cell(r.bwmd),
            cell(r.lzjd)
        ));
    }
    out
}
