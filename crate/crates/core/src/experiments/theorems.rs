//! Randomized checks of the EBWT shortcomings and the matching BWMD and LZJD
//! behaviors. Implementations are pluggable so a deliberately broken variant
//! can be shown to fail.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bwt::bwt_oracle;
use crate::ebwt::{ebwt_distance, ebwt_merge, Source};
use crate::embed::{bwmd_distance, embed, hellinger, BwmdEmbedding};
use crate::error::Result;
use crate::lzjd::{lz_set, lzjd_distance};
use crate::sequence::Sequence;

pub type EbwtFn = fn(&Sequence, &Sequence) -> Result<u64>;
pub type EmbedFn = fn(&Sequence) -> Result<BwmdEmbedding>;
pub type BwmdFn = fn(&BwmdEmbedding, &BwmdEmbedding) -> Result<f64>;
pub type LzjdFn = fn(&Sequence, &Sequence) -> f64;

#[derive(Clone, Copy)]
pub struct Implementations {
    pub ebwt: EbwtFn,
    pub embed: EmbedFn,
    pub bwmd: BwmdFn,
    pub lzjd: LzjdFn,
}

fn lzjd_of(u: &Sequence, v: &Sequence) -> f64 {
    lzjd_distance(&lz_set(u), &lz_set(v))
}

impl Default for Implementations {
    fn default() -> Self {
        Implementations {
            ebwt: ebwt_distance,
            embed,
            bwmd: bwmd_distance,
            lzjd: lzjd_of,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TheoremConfig {
    /// Random cases per randomized check.
    pub cases: usize,
    pub max_len: usize,
}

impl Default for TheoremConfig {
    fn default() -> Self {
        TheoremConfig {
            cases: 300,
            max_len: 300,
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub passed: bool,
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TheoremReport {
    pub seed: u64,
    pub checks: Vec<CheckOutcome>,
}

impl TheoremReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// One `PASS`/`FAIL` line per check.
    pub fn render(&self) -> String {
        self.checks
            .iter()
            .map(|c| {
                let verdict = if c.passed { "PASS" } else { "FAIL" };
                match &c.counterexample {
                    Some(ce) => format!("{verdict} {} ({} cases): {ce}\n", c.name, c.cases),
                    None => format!("{verdict} {} ({} cases)\n", c.name, c.cases),
                }
            })
            .collect()
    }
}

/// Runs `case` until the first failure, which becomes the counterexample.
fn check<F>(name: &'static str, cases: usize, mut case: F) -> CheckOutcome
where
    F: FnMut(usize) -> std::result::Result<(), String>,
{
    for i in 0..cases {
        if let Err(ce) = case(i) {
            return CheckOutcome {
                name,
                cases: i + 1,
                passed: false,
                counterexample: Some(ce),
            };
        }
    }
    CheckOutcome {
        name,
        cases,
        passed: true,
        counterexample: None,
    }
}

fn random_seq(
    rng: &mut ChaCha8Rng,
    sigma: u32,
    lengths: std::ops::RangeInclusive<usize>,
) -> Sequence {
    let len = rng.random_range(lengths);
    let tokens = (0..len).map(|_| rng.random_range(0..sigma)).collect();
    Sequence::new("r", tokens, sigma).expect("in range")
}

fn run(n: usize) -> Sequence {
    Sequence::new("a", vec![0; n], 1).expect("in range")
}

/// Dense transition distribution counted directly from the reference BWT.
pub(crate) fn oracle_transitions(seq: &Sequence) -> Result<Vec<f64>> {
    let out = bwt_oracle(seq)?;
    let sigma = seq.alphabet_size() as usize;
    let mut counts = vec![0.0f64; sigma * sigma];
    let symbols: Vec<Option<u32>> = (0..out.len()).map(|i| out.symbol(i)).collect();
    for w in symbols.windows(2) {
        if let [Some(prev), Some(cur)] = w {
            counts[*cur as usize + *prev as usize * sigma] += 1.0;
        }
    }
    let total: f64 = counts.iter().sum();
    Ok(counts.into_iter().map(|c| c / total).collect())
}

fn show(s: &Sequence) -> String {
    let t = s.tokens();
    if t.len() <= 12 {
        format!("{t:?}")
    } else {
        format!("{:?}..(len {})", &t[..12], t.len())
    }
}

/// Runs every property check with RNG seeded from `seed`.
pub fn theorem_suite(seed: u64, config: &TheoremConfig, imp: &Implementations) -> TheoremReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = config.cases;
    let max_len = config.max_len.max(4);
    let mut checks = Vec::new();

    checks.push(check("ebwt_length_gap_lower_bound", n, |_| {
        let sigma = *[2u32, 4, 32, 256].choose(&mut rng).unwrap();
        let u = random_seq(&mut rng, sigma, 1..=max_len);
        let v = random_seq(&mut rng, sigma, 1..=max_len);
        let d = (imp.ebwt)(&u, &v).map_err(|e| e.to_string())?;
        let bound = u.len().abs_diff(v.len()) as i64 - 1;
        if (d as i64) < bound {
            return Err(format!("u={} v={} d={d} < {bound}", show(&u), show(&v)));
        }
        Ok(())
    }));

    checks.push(check("ebwt_single_symbol_is_maximal", n, |_| {
        let n1 = rng.random_range(1..max_len);
        let n2 = rng.random_range(n1 + 1..=max_len);
        let d = (imp.ebwt)(&run(n1), &run(n2)).map_err(|e| e.to_string())?;
        if d != (n1 + n2 - 2) as u64 {
            return Err(format!("n1={n1} n2={n2} d={d}, expected {}", n1 + n2 - 2));
        }
        Ok(())
    }));

    checks.push(check(
        "ebwt_disjoint_interleaved_is_zero",
        n.min(100),
        |i| {
            let n0 = i + 1;
            let sigma = 2 * n0 as u32 + 2;
            let u = Sequence::new("u", (1..=n0 as u32).map(|k| 2 * k).collect(), sigma).unwrap();
            let v =
                Sequence::new("v", (1..=n0 as u32).map(|k| 2 * k + 1).collect(), sigma).unwrap();
            let d = (imp.ebwt)(&u, &v).map_err(|e| e.to_string())?;
            if d != 0 {
                return Err(format!("n0={n0} d={d}"));
            }
            Ok(())
        },
    ));

    checks.push(check("ebwt_symmetric", n, |_| {
        let sigma = rng.random_range(2..=8);
        let u = random_seq(&mut rng, sigma, 1..=max_len.min(60));
        let v = random_seq(&mut rng, sigma, 1..=max_len.min(60));
        let (a, b) = (
            (imp.ebwt)(&u, &v).map_err(|e| e.to_string())?,
            (imp.ebwt)(&v, &u).map_err(|e| e.to_string())?,
        );
        if a != b {
            return Err(format!("u={} v={} {a} != {b}", show(&u), show(&v)));
        }
        Ok(())
    }));

    checks.push(check("ebwt_merge_label_counts", n, |_| {
        let sigma = rng.random_range(1..=6);
        let u = random_seq(&mut rng, sigma, 1..=max_len);
        let v = random_seq(&mut rng, sigma, 1..=max_len);
        let trace = ebwt_merge(&u, &v).map_err(|e| e.to_string())?;
        if trace.count(Source::U) != u.len() || trace.count(Source::V) != v.len() {
            return Err(format!("u={} v={}", show(&u), show(&v)));
        }
        Ok(())
    }));

    checks.push(check("bwmd_single_symbol_is_zero", n, |_| {
        let n1 = rng.random_range(2..max_len);
        let n2 = rng.random_range(n1 + 1..=max_len);
        let sigma = rng.random_range(1..=256);
        let a = rng.random_range(0..sigma);
        let mk = |len| Sequence::new("a", vec![a; len], sigma).unwrap();
        let eu = (imp.embed)(&mk(n1)).map_err(|e| e.to_string())?;
        let ev = (imp.embed)(&mk(n2)).map_err(|e| e.to_string())?;
        let d = (imp.bwmd)(&eu, &ev).map_err(|e| e.to_string())?;
        if d != 0.0 {
            return Err(format!("n1={n1} n2={n2} d={d}"));
        }
        Ok(())
    }));

    checks.push(check("bwmd_disjoint_alphabets_is_one", n, |_| {
        let sigma = 2 * rng.random_range(1..=128u32);
        let half = sigma / 2;
        let u = random_seq(&mut rng, half, 3..=max_len);
        let v_tokens = (0..rng.random_range(3..=max_len))
            .map(|_| half + rng.random_range(0..half))
            .collect();
        let u = Sequence::new("u", u.tokens().to_vec(), sigma).unwrap();
        let v = Sequence::new("v", v_tokens, sigma).unwrap();
        let d = (imp.bwmd)(
            &(imp.embed)(&u).map_err(|e| e.to_string())?,
            &(imp.embed)(&v).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        if (d - 1.0).abs() > 1e-9 {
            return Err(format!("u={} v={} d={d}", show(&u), show(&v)));
        }
        Ok(())
    }));

    checks.push(check("bwmd_equals_hellinger_oracle", n, |_| {
        let sigma = *[2u32, 4, 16, 32].choose(&mut rng).unwrap();
        let u = random_seq(&mut rng, sigma, 3..=max_len);
        let v = random_seq(&mut rng, sigma, 3..=max_len);
        let emb = |s: &Sequence| (imp.embed)(s).map_err(|e| e.to_string());
        let d = (imp.bwmd)(&emb(&u)?, &emb(&v)?).map_err(|e| e.to_string())?;
        let p = oracle_transitions(&u).map_err(|e| e.to_string())?;
        let q = oracle_transitions(&v).map_err(|e| e.to_string())?;
        let h = hellinger(&p, &q).map_err(|e| e.to_string())?;
        if (d - h).abs() > 1e-9 {
            return Err(format!(
                "u={} v={} bwmd={d} hellinger={h}",
                show(&u),
                show(&v)
            ));
        }
        Ok(())
    }));

    checks.push(check("bwmd_metric_axioms", n, |_| {
        let sigma = *[2u32, 4, 32].choose(&mut rng).unwrap();
        let mut e = Vec::new();
        for _ in 0..3 {
            let s = random_seq(&mut rng, sigma, 3..=max_len);
            e.push((imp.embed)(&s).map_err(|e| e.to_string())?);
        }
        let d = |i: usize, j: usize| (imp.bwmd)(&e[i], &e[j]).map_err(|e| e.to_string());
        let (ab, bc, ac, ba, aa) = (d(0, 1)?, d(1, 2)?, d(0, 2)?, d(1, 0)?, d(0, 0)?);
        if ac > ab + bc + 1e-9 {
            return Err(format!("triangle: {ac} > {ab} + {bc}"));
        }
        if ab != ba || aa != 0.0 || !(0.0..=1.0 + 1e-12).contains(&ab) {
            return Err(format!("symmetry/identity/range: ab={ab} ba={ba} aa={aa}"));
        }
        Ok(())
    }));

    checks.push(check("lzjd_triangular_closed_form", 12, |i| {
        let tri = |m: usize| m * (m + 1) / 2;
        let (m1, m2) = (i + 1, i + 2 + i % 3);
        let (n1, n2) = (tri(m1), tri(m2));
        let d = (imp.lzjd)(&run(n1), &run(n2));
        let closed =
            1.0 - ((8.0 * n1 as f64 + 1.0).sqrt() - 1.0) / ((8.0 * n2 as f64 + 1.0).sqrt() - 1.0);
        if d != closed {
            return Err(format!("n1={n1} n2={n2} d={d} closed form={closed}"));
        }
        Ok(())
    }));

    checks.push(check("lzjd_metric_axioms", n, |_| {
        let sigma = rng.random_range(2..=4);
        let s: Vec<Sequence> = (0..3)
            .map(|_| random_seq(&mut rng, sigma, 0..=max_len))
            .collect();
        let d = |i: usize, j: usize| (imp.lzjd)(&s[i], &s[j]);
        let (ab, bc, ac) = (d(0, 1), d(1, 2), d(0, 2));
        if ac > ab + bc + 1e-12 || ab != d(1, 0) {
            return Err(format!("ab={ab} bc={bc} ac={ac}"));
        }
        Ok(())
    }));

    TheoremReport { seed, checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let cfg = TheoremConfig {
            cases: 60,
            max_len: 80,
        };
        let report = theorem_suite(1, &cfg, &Implementations::default());
        assert!(report.all_passed(), "{}", report.render());
    }

    #[test]
    fn off_by_one_ebwt_is_caught() {
        fn broken(u: &Sequence, v: &Sequence) -> Result<u64> {
            // Counts every run, not run length minus one.
            let trace = ebwt_merge(u, v)?;
            Ok(trace.runs().iter().map(|&r| r as u64).sum::<u64>() - 1)
        }
        let imp = Implementations {
            ebwt: broken,
            ..Implementations::default()
        };
        let cfg = TheoremConfig {
            cases: 20,
            max_len: 40,
        };
        let report = theorem_suite(3, &cfg, &imp);
        let c = report.check("ebwt_single_symbol_is_maximal").unwrap();
        assert!(!c.passed);
        assert!(c.counterexample.is_some());
    }

    #[test]
    fn oracle_distribution_sums_to_one() {
        let s = Sequence::from_letters("e", "easypeasy").unwrap();
        let p = oracle_transitions(&s).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(p.iter().filter(|&&x| x > 0.0).count(), 7);
    }
}
