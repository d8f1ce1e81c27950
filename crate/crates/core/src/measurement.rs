//! Ideal photon-number-resolving detection, conditioning and post-selection
//! bookkeeping.
//!
//! Probabilities are always normalized by the current squared norm of the
//! state. The truncation weight carried by the state (`norm_deficit`) is
//! reported separately as the distribution's `residual`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{accumulate, AmpMap, Bipartition, ModeId, Occupation, PureState, C64};

/// Probabilities below this are treated as impossible when conditioning.
pub const MIN_OUTCOME_PROBABILITY: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CountOutcome {
    pub mode: ModeId,
    pub count: u32,
}

/// Joint distribution of photon counts over a list of labelled modes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutcomeDistribution {
    labels: Vec<String>,
    entries: BTreeMap<Vec<u32>, f64>,
    residual: f64,
}

impl OutcomeDistribution {
    pub fn new(labels: Vec<String>, entries: BTreeMap<Vec<u32>, f64>, residual: f64) -> Self {
        OutcomeDistribution {
            labels,
            entries,
            residual,
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Entries in lexicographic order of the count tuples.
    pub fn iter(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.entries.iter().map(|(k, p)| (k.as_slice(), *p))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn prob(&self, counts: &[u32]) -> f64 {
        self.entries.get(counts).copied().unwrap_or(0.0)
    }

    /// Total probability of outcomes satisfying `pred`.
    pub fn prob_where(&self, pred: impl Fn(&[u32]) -> bool) -> f64 {
        self.entries
            .iter()
            .filter(|(k, _)| pred(k))
            .fold(0.0, |acc, (_, p)| acc + p)
    }

    pub fn total(&self) -> f64 {
        self.entries.values().fold(0.0, |acc, p| acc + p)
    }

    /// Position of `label` in the count tuples.
    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::arg(format!("distribution has no mode `{label}`")))
    }

    fn check_labels(&self, other: &Self) -> Result<()> {
        if self.labels != other.labels {
            return Err(Error::arg(format!(
                "distributions over different modes: {:?} vs {:?}",
                self.labels, other.labels
            )));
        }
        Ok(())
    }

    fn union_diffs<'a>(&'a self, other: &'a Self) -> impl Iterator<Item = f64> + 'a {
        let a = self.entries.iter().map(move |(k, p)| (p - other.prob(k)).abs());
        let b = other
            .entries
            .iter()
            .filter(move |(k, _)| !self.entries.contains_key(*k))
            .map(|(_, p)| p.abs());
        a.chain(b)
    }

    /// Half the L1 distance between the two distributions.
    pub fn total_variation(&self, other: &Self) -> Result<f64> {
        self.check_labels(other)?;
        Ok(0.5 * self.union_diffs(other).fold(0.0, |acc, d| acc + d))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_labels(other)?;
        Ok(self.union_diffs(other).fold(0.0, f64::max))
    }

    /// Uniform mixture of distributions over the same modes, summed in the
    /// given order.
    pub fn average(dists: &[OutcomeDistribution]) -> Result<OutcomeDistribution> {
        let first = dists
            .first()
            .ok_or_else(|| Error::arg("cannot average zero distributions"))?;
        let w = 1.0 / dists.len() as f64;
        let mut entries = BTreeMap::new();
        let mut residual = 0.0;
        for d in dists {
            first.check_labels(d)?;
            for (k, p) in &d.entries {
                *entries.entry(k.clone()).or_insert(0.0) += w * p;
            }
            residual += w * d.residual;
        }
        Ok(OutcomeDistribution::new(first.labels.clone(), entries, residual))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceStep {
    pub description: String,
    pub probability: f64,
}

/// Ordered record of post-selection events.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExecutionTrace {
    steps: Vec<TraceStep>,
    cumulative: f64,
}

impl Default for ExecutionTrace {
    fn default() -> Self {
        ExecutionTrace {
            steps: Vec::new(),
            cumulative: 1.0,
        }
    }
}

impl ExecutionTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, description: impl Into<String>, probability: f64) {
        self.cumulative *= probability;
        self.steps.push(TraceStep {
            description: description.into(),
            probability,
        });
    }

    /// Append another trace's steps.
    pub fn extend(&mut self, other: &ExecutionTrace) {
        for s in &other.steps {
            self.record(s.description.clone(), s.probability);
        }
    }

    pub fn steps(&self) -> &[TraceStep] {
        &self.steps
    }

    /// Product of all step probabilities.
    pub fn cumulative(&self) -> f64 {
        self.cumulative
    }
}

fn residual_of(s: &PureState) -> f64 {
    s.norm_deficit().clamp(0.0, 1.0)
}

fn checked_norm(s: &PureState) -> Result<f64> {
    let n2 = s.norm_sqr();
    if !(n2 > MIN_OUTCOME_PROBABILITY) {
        return Err(Error::DegenerateState(n2));
    }
    Ok(n2)
}

pub fn count_distribution(s: &PureState, mode: ModeId) -> Result<OutcomeDistribution> {
    joint_count_distribution(s, &[mode])
}

/// Joint count distribution of `modes`, marginalizing all other modes.
pub fn joint_count_distribution(s: &PureState, modes: &[ModeId]) -> Result<OutcomeDistribution> {
    for (i, m) in modes.iter().enumerate() {
        s.check_id(*m)?;
        if modes[..i].contains(m) {
            return Err(Error::arg(format!("mode {m} listed twice")));
        }
    }
    let n2 = checked_norm(s)?;
    let idx: Vec<usize> = modes.iter().map(|m| m.0).collect();
    let mut entries: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    for (occ, amp) in s.sorted_terms() {
        let key: Vec<u32> = idx.iter().map(|&i| occ[i]).collect();
        *entries.entry(key).or_insert(0.0) += amp.norm_sqr();
    }
    entries.values_mut().for_each(|p| *p /= n2);
    let labels = modes.iter().map(|&m| s.label(m).to_string()).collect();
    Ok(OutcomeDistribution::new(labels, entries, residual_of(s)))
}

/// Project onto `n` photons in `mode`. Returns the outcome probability and
/// the normalized post-measurement state with `mode` removed.
pub fn condition_on_count(s: &PureState, mode: ModeId, n: u32) -> Result<(f64, PureState)> {
    s.check_id(mode)?;
    let n2 = checked_norm(s)?;
    let m = mode.0;
    let mut amps = AmpMap::default();
    let mut weight = 0.0;
    for (occ, amp) in s.sorted_terms() {
        if occ[m] == n {
            weight += amp.norm_sqr();
            accumulate(&mut amps, occ.without(m), amp);
        }
    }
    let probability = weight / n2;
    if !(probability >= MIN_OUTCOME_PROBABILITY) {
        return Err(Error::ImpossibleOutcome {
            mode: s.label(mode).to_string(),
            count: n,
            probability,
        });
    }
    let mut modes = s.modes().to_vec();
    modes.remove(m);
    let scale = 1.0 / weight.sqrt();
    amps.values_mut().for_each(|a| *a *= scale);
    Ok((probability, s.with_modes_amps(modes, amps)))
}

/// Condition on several outcomes in sequence. Returns the joint probability.
pub fn condition_on_counts(s: &PureState, outcomes: &[CountOutcome]) -> Result<(f64, PureState)> {
    let labels: Vec<String> = outcomes.iter().map(|o| s.label(o.mode).to_string()).collect();
    let mut state = s.clone();
    let mut p = 1.0;
    for (o, label) in outcomes.iter().zip(&labels) {
        let id = state.mode_id(label)?;
        let (q, next) = condition_on_count(&state, id, o.count)?;
        p *= q;
        state = next;
    }
    Ok((p, state))
}

/// A state split as `factor ⊗ remaining`.
#[derive(Clone, Debug)]
pub struct Factorized {
    /// The split-off modes, normalized, largest amplitude real positive.
    pub factor: PureState,
    /// The other modes, normalized.
    pub remaining: PureState,
    /// Purity of the reduced state of the split-off modes.
    pub purity: f64,
}

/// Split `subset` off as a product factor. Fails with
/// [`Error::EntangledMode`] when the reduced purity is below `1 − tol`.
pub fn factorize(s: &PureState, subset: &[ModeId], tol: f64) -> Result<Factorized> {
    let bp = Bipartition::new(s, subset)?;
    let n2 = checked_norm(s)?;
    let purity = bp.purity_unnormalized()? / (n2 * n2);
    if !(purity >= 1.0 - tol) {
        return Err(Error::EntangledMode {
            modes: subset.iter().map(|&m| s.label(m).to_string()).collect(),
            purity,
        });
    }
    let (u, r) = bp.dominant_factor();
    let build = |idx: &[usize], keys: &[Occupation], amps: &[C64]| {
        let modes = idx.iter().map(|&i| s.modes()[i].clone()).collect();
        let mut map = AmpMap::default();
        for (k, a) in keys.iter().zip(amps) {
            map.insert(k.clone(), *a);
        }
        s.with_modes_amps(modes, map)
    };
    let factor = build(&bp.sub_idx, &bp.sub_keys, &u);
    let remaining = build(&bp.rest_idx, &bp.rest_keys, &r).normalize()?;
    let mut factor = factor.normalize()?;
    factor.set_norm_deficit(0.0);
    Ok(Factorized {
        factor,
        remaining,
        purity,
    })
}

/// Remove a single mode that must be in a product with the rest of the state.
pub fn drop_factorized_mode(s: &PureState, mode: ModeId, tol: f64) -> Result<Factorized> {
    factorize(s, &[mode], tol)
}
