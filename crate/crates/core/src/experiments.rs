//! The four measurement settings, the Hardy witness and phase averaging.
//!
//! Alice either counts `u1` directly or mixes it with `lo_a` on a 50:50
//! splitter and counts the outputs `(c1, d1)`; Bob does the same with `u2`
//! and `lo_b`. The homodyne event `D` is one photon at `d` and none at `c`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{run_on, Circuit, CircuitStep};
use crate::error::{Error, Result};
use crate::measurement::{joint_count_distribution, ExecutionTrace, OutcomeDistribution};
use crate::scheme::{
    pre_detection_state, PreDetection, SchemeParams, SourceMode, C1, C2, D1, D2, FACTOR_TOL, LO_A,
    LO_B, REM, U1, U2,
};

/// Local measurement choice of one party.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Setting {
    /// Count the signal mode directly.
    Number,
    /// Mix with the local oscillator and count both outputs.
    Homodyne,
}

/// One of the four combinations of local settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Experiment(u8);

impl Experiment {
    pub const ALL: [Experiment; 4] = [Experiment(1), Experiment(2), Experiment(3), Experiment(4)];

    pub fn new(n: u8) -> Result<Self> {
        if (1..=4).contains(&n) {
            Ok(Experiment(n))
        } else {
            Err(Error::arg(format!("experiment must be 1, 2, 3 or 4, got {n}")))
        }
    }

    pub fn number(self) -> u8 {
        self.0
    }

    pub fn alice(self) -> Setting {
        if self.0.is_multiple_of(2) {
            Setting::Homodyne
        } else {
            Setting::Number
        }
    }

    pub fn bob(self) -> Setting {
        if self.0 >= 3 {
            Setting::Homodyne
        } else {
            Setting::Number
        }
    }

    /// Measured modes, in table column order.
    pub fn columns(self) -> Vec<&'static str> {
        let mut cols = match self.alice() {
            Setting::Number => vec![U1],
            Setting::Homodyne => vec![C1, D1],
        };
        match self.bob() {
            Setting::Number => cols.push(U2),
            Setting::Homodyne => cols.extend([C2, D2]),
        }
        cols
    }

    /// Circuit taking the pre-detection state to the measured modes. The
    /// oscillator a party does not use is split off as a product factor.
    pub fn circuit(self, with_remainder: bool) -> Circuit {
        let mut c = Circuit::new(format!("experiment {}", self.0));
        if with_remainder {
            c.push(CircuitStep::drop_factorized(REM, FACTOR_TOL));
        }
        match self.alice() {
            Setting::Number => c.push(CircuitStep::drop_factorized(LO_A, FACTOR_TOL)),
            Setting::Homodyne => c.push(CircuitStep::beam_splitter_to(U1, LO_A, FRAC_1_SQRT_2, D1, C1)),
        };
        match self.bob() {
            Setting::Number => c.push(CircuitStep::drop_factorized(LO_B, FACTOR_TOL)),
            Setting::Homodyne => c.push(CircuitStep::beam_splitter_to(U2, LO_B, FRAC_1_SQRT_2, D2, C2)),
        };
        c
    }

    /// Whether a count record is the outcome that enters the Hardy witness:
    /// joint detection for 1, `D` with no photon on the other side for 2
    /// and 3, `D` on both sides for 4.
    pub fn is_witness_event(self, k: &[u32]) -> bool {
        match self.0 {
            1 => k[0] >= 1 && k[1] >= 1,
            2 => k == [0, 1, 0],
            3 => k == [0, 0, 1],
            _ => k == [0, 1, 0, 1],
        }
    }

    pub fn witness_event(self, d: &OutcomeDistribution) -> f64 {
        d.prob_where(|k| self.is_witness_event(k))
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Coarse local outcome: `{0, 1+}` for counting, `{D, other}` for homodyne.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum CoarseOutcome {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1+")]
    OnePlus,
    D,
    #[serde(rename = "other")]
    Other,
}

impl CoarseOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            CoarseOutcome::Zero => "0",
            CoarseOutcome::OnePlus => "1+",
            CoarseOutcome::D => "D",
            CoarseOutcome::Other => "other",
        }
    }
}

fn coarse_local(setting: Setting, counts: &[u32]) -> CoarseOutcome {
    match setting {
        Setting::Number if counts[0] == 0 => CoarseOutcome::Zero,
        Setting::Number => CoarseOutcome::OnePlus,
        Setting::Homodyne if counts == [0, 1] => CoarseOutcome::D,
        Setting::Homodyne => CoarseOutcome::Other,
    }
}

/// Joint probabilities of the coarse local outcomes, keyed `(alice, bob)`;
/// all four combinations are always present.
pub fn coarse_grain(e: Experiment, d: &OutcomeDistribution) -> Vec<(CoarseOutcome, CoarseOutcome, f64)> {
    let split = match e.alice() {
        Setting::Number => 1,
        Setting::Homodyne => 2,
    };
    let local = |s: Setting| match s {
        Setting::Number => [CoarseOutcome::Zero, CoarseOutcome::OnePlus],
        Setting::Homodyne => [CoarseOutcome::D, CoarseOutcome::Other],
    };
    let mut acc = std::collections::BTreeMap::new();
    for a in local(e.alice()) {
        for b in local(e.bob()) {
            acc.insert((a, b), 0.0);
        }
    }
    for (k, p) in d.iter() {
        let a = coarse_local(e.alice(), &k[..split]);
        let b = coarse_local(e.bob(), &k[split..]);
        *acc.entry((a, b)).or_insert(0.0) += p;
    }
    acc.into_iter().map(|((a, b), p)| (a, b, p)).collect()
}

/// Outcome table of one experiment on an already prepared state.
pub fn run_experiment_on(e: Experiment, pre: &PreDetection, p: &SchemeParams) -> Result<OutcomeDistribution> {
    let r = run_on(&e.circuit(pre.has_remainder()), pre.state.clone(), &p.run_options())?;
    let s = r.final_state;
    let ids = e
        .columns()
        .iter()
        .map(|l| s.mode_id(l))
        .collect::<Result<Vec<_>>>()?;
    joint_count_distribution(&s, &ids)
}

pub fn run_experiment(n: u8, p: &SchemeParams) -> Result<OutcomeDistribution> {
    let e = Experiment::new(n)?;
    run_experiment_on(e, &pre_detection_state(p)?, p)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub p_joint_nn: f64,
    pub p_zero_hn: f64,
    pub p_zero_nh: f64,
    pub p4: f64,
}

impl Witness {
    /// Contradiction iff the three zero events stay below `tol` while the
    /// joint `D` event exceeds `10 tol`.
    pub fn verdict(&self, tol: f64) -> bool {
        self.p_joint_nn < tol && self.p_zero_hn < tol && self.p_zero_nh < tol && self.p4 > 10.0 * tol
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.p_joint_nn, self.p_zero_hn, self.p_zero_nh, self.p4]
    }
}

#[derive(Clone, Debug)]
pub struct HardyStatistics {
    /// Tables of experiments 1 to 4, in order.
    pub experiments: Vec<OutcomeDistribution>,
    pub witness: Witness,
    pub verdict: bool,
    /// Post-selection record of the preparation.
    pub trace: ExecutionTrace,
    /// Truncation weight missing from the pre-detection state.
    pub norm_deficit: f64,
}

impl HardyStatistics {
    pub fn experiment(&self, e: Experiment) -> &OutcomeDistribution {
        &self.experiments[e.0 as usize - 1]
    }
}

pub fn hardy_witness(p: &SchemeParams) -> Result<HardyStatistics> {
    let pre = pre_detection_state(p)?;
    let experiments = Experiment::ALL
        .par_iter()
        .map(|e| run_experiment_on(*e, &pre, p))
        .collect::<Result<Vec<_>>>()?;
    let ev = |i: usize| Experiment::ALL[i].witness_event(&experiments[i]);
    let witness = Witness {
        p_joint_nn: ev(0),
        p_zero_hn: ev(1),
        p_zero_nh: ev(2),
        p4: ev(3),
    };
    Ok(HardyStatistics {
        verdict: witness.verdict(p.tol),
        witness,
        trace: pre.trace,
        norm_deficit: pre.state.norm_deficit(),
        experiments,
    })
}

/// Largest absolute difference between corresponding entries of two sets
/// of experiment tables.
pub fn max_table_difference(a: &HardyStatistics, b: &HardyStatistics) -> Result<f64> {
    a.experiments
        .iter()
        .zip(&b.experiments)
        .try_fold(0.0f64, |m, (x, y)| Ok(m.max(x.max_abs_diff(y)?)))
}

/// Max absolute difference over all four experiments between the ideal
/// pipeline and the full one.
pub fn compare_ideal_vs_full(p: &SchemeParams) -> Result<f64> {
    let (ideal, full) = rayon::join(
        || hardy_witness(&p.with_mode(SourceMode::Ideal)),
        || hardy_witness(&p.with_mode(SourceMode::Full)),
    );
    max_table_difference(&ideal?, &full?)
}

/// Experiment-4 tables for each phase, in input order.
pub fn exp4_over_phases(p: &SchemeParams, phis: &[f64]) -> Result<Vec<OutcomeDistribution>> {
    phis.par_iter()
        .map(|&phi| run_experiment(4, &p.with_phi(phi)))
        .collect()
}

/// Largest total-variation distance between the Experiment-4 table at any
/// of `phis` and the one at `phis[0]`.
pub fn phase_sweep(p: &SchemeParams, phis: &[f64]) -> Result<f64> {
    if phis.len() < 2 {
        return Err(Error::arg("a phase sweep needs at least two phases"));
    }
    let dists = exp4_over_phases(p, phis)?;
    dists[1..]
        .iter()
        .try_fold(0.0f64, |m, d| Ok(m.max(dists[0].total_variation(d)?)))
}

/// `2πk/n` for `k = 0..n`.
pub fn uniform_phases(n: usize) -> Vec<f64> {
    (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
}

/// Uniform mixture of Experiment-4 tables over `grid_size` equally spaced
/// phases.
pub fn phase_average(p: &SchemeParams, grid_size: usize) -> Result<OutcomeDistribution> {
    if grid_size == 0 {
        return Err(Error::arg("phase grid must have at least one point"));
    }
    OutcomeDistribution::average(&exp4_over_phases(p, &uniform_phases(grid_size))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn settings_and_columns() {
        let e: Vec<_> = Experiment::ALL.iter().map(|e| (e.alice(), e.bob())).collect();
        assert_eq!(
            e,
            vec![
                (Setting::Number, Setting::Number),
                (Setting::Homodyne, Setting::Number),
                (Setting::Number, Setting::Homodyne),
                (Setting::Homodyne, Setting::Homodyne),
            ]
        );
        assert_eq!(Experiment(4).columns(), vec!["c1", "d1", "c2", "d2"]);
        assert!(Experiment::new(5).is_err());
        assert!(Experiment::new(0).is_err());
    }

    #[test]
    fn verdict_threshold() {
        let w = Witness {
            p_joint_nn: 0.0,
            p_zero_hn: 1e-12,
            p_zero_nh: 0.0,
            p4: 0.011,
        };
        assert!(w.verdict(1e-8));
        assert!(!w.verdict(1.0));
    }

    #[test]
    fn ideal_witness() {
        let s = hardy_witness(&SchemeParams::ideal()).unwrap();
        assert!(s.verdict);
        assert!((s.witness.p4 - (-2f64).exp() / 12.0).abs() < 1e-9);
        let coarse = coarse_grain(Experiment(2), s.experiment(Experiment(2)));
        let zero = coarse
            .iter()
            .find(|(a, b, _)| *a == CoarseOutcome::D && *b == CoarseOutcome::Zero)
            .map_or(0.0, |x| x.2);
        assert!(zero < 1e-14);
        let total: f64 = coarse.iter().map(|x| x.2).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
