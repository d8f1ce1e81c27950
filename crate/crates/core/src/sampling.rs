//! Finite-shot emulation of an exact count distribution.
//!
//! Shots are drawn with `ChaCha8Rng::seed_from_u64(seed)` and a
//! `WeightedIndex` over the table in lexicographic order, so a seed fixes
//! the record on every platform.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::measurement::OutcomeDistribution;

/// Two-sided 95% standard normal quantile.
pub const Z95: f64 = 1.959963984540054;

/// Name of the generator, as reported in sample documents.
pub const GENERATOR: &str = "ChaCha8 (rand_chacha::ChaCha8Rng::seed_from_u64)";

#[derive(Clone, Debug, PartialEq)]
pub struct SampleRecord {
    pub shots: u64,
    pub seed: u64,
    /// Observed outcomes with their counts, lexicographic; unobserved
    /// outcomes are omitted.
    pub counts: Vec<(Vec<u32>, u64)>,
}

impl SampleRecord {
    pub fn frequency(&self, count: u64) -> f64 {
        count as f64 / self.shots as f64
    }

    /// Number of shots whose outcome satisfies `pred`.
    pub fn count_where(&self, pred: impl Fn(&[u32]) -> bool) -> u64 {
        self.counts.iter().filter(|(k, _)| pred(k)).map(|(_, c)| c).sum()
    }
}

pub fn sample_counts(d: &OutcomeDistribution, shots: u64, seed: u64) -> Result<SampleRecord> {
    if shots == 0 {
        return Err(Error::arg("shots must be at least 1"));
    }
    let outcomes: Vec<(&[u32], f64)> = d.iter().collect();
    let dist = WeightedIndex::new(outcomes.iter().map(|(_, p)| p.max(0.0)))
        .map_err(|e| Error::arg(format!("cannot sample the distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = vec![0u64; outcomes.len()];
    for _ in 0..shots {
        tally[dist.sample(&mut rng)] += 1;
    }
    let counts = tally
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c > 0)
        .map(|(i, c)| (outcomes[i].0.to_vec(), c))
        .collect();
    Ok(SampleRecord { shots, seed, counts })
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    let n = n as f64;
    let ph = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (ph + z2 / (2.0 * n)) / denom;
    let half = z / denom * (ph * (1.0 - ph) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}
