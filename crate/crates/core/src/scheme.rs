//! The optical layout: scissors preparation of the one-photon source, the
//! 50:50 splitter that distributes it to Alice (`u1`) and Bob (`u2`), and the
//! reference chain that carves both local oscillators out of the scissors'
//! left-over beam.
//!
//! Port orientation of every splitter (see [`crate::elements`] for the
//! convention):
//!
//! | splitter        | port_a              | port_b          | outputs (a, b)   |
//! |-----------------|---------------------|-----------------|------------------|
//! | scissors BS1    | coherent input `s`  | vacuum          | `s`, `ref`       |
//! | scissors BS2    | single photon `p`   | vacuum `out`    | `p`, `out`       |
//! | scissors BS3    | `s`                 | `p`             | detector A, B    |
//! | source          | vacuum              | `out`           | `u1`, `u2`       |
//! | chain BS1       | `ref`               | vacuum          | `ref`, `lo_a`    |
//! | chain BS2       | `ref` (after mirror)| vacuum          | `rem`, `lo_b`    |
//! | Alice homodyne  | `u1`                | `lo_a`          | `d1`, `c1`       |
//! | Bob homodyne    | `u2`                | `lo_b`          | `d2`, `c2`       |
//!
//! With these choices the scissors success event is (A = 1, B = 0), the
//! source amplitudes carry the relative `i` on the `u1` photon, and the
//! homodyne zero lands on `c = 0, d = 1`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::circuit::{run, run_on, Circuit, CircuitStep, RunOptions};
use crate::error::{Error, Result};
use crate::fock::{default_cutoff, ModeId, PureState, C64};
use crate::measurement::{factorize, ExecutionTrace};

pub const U1: &str = "u1";
pub const U2: &str = "u2";
pub const LO_A: &str = "lo_a";
pub const LO_B: &str = "lo_b";
pub const REM: &str = "rem";
pub const REF: &str = "ref";
pub const OUT: &str = "out";
pub const C1: &str = "c1";
pub const D1: &str = "d1";
pub const C2: &str = "c2";
pub const D2: &str = "d2";

/// Purity slack allowed when a mode is split off as a product factor.
pub const FACTOR_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceMode {
    /// Exact one-photon source and exact unit-amplitude local oscillators.
    Ideal,
    /// Everything built from the coherent input, scissors and reference chain.
    Full,
}

impl std::str::FromStr for SourceMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(SourceMode::Ideal),
            "full" => Ok(SourceMode::Full),
            _ => Err(Error::arg(format!("unknown mode `{s}` (expected ideal or full)"))),
        }
    }
}

impl std::fmt::Display for SourceMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SourceMode::Ideal => "ideal",
            SourceMode::Full => "full",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    /// Magnitude of the coherent input amplitude.
    pub alpha: f64,
    /// Phase of the coherent input amplitude, radians.
    pub phi: f64,
    pub mode: SourceMode,
    /// Tail weight for the default coherent cutoff rule.
    pub tail_threshold: f64,
    /// Explicit cutoff for coherent inputs, overriding the tail rule.
    pub cutoff: Option<u32>,
    /// Added to every coherent cutoff.
    pub cutoff_pad: u32,
    pub prune_eps: f64,
    /// Threshold for the Hardy verdict.
    pub tol: f64,
}

impl Default for SchemeParams {
    fn default() -> Self {
        SchemeParams {
            alpha: 3.0,
            phi: 0.0,
            mode: SourceMode::Full,
            tail_threshold: 1e-12,
            cutoff: None,
            cutoff_pad: 0,
            prune_eps: 0.0,
            tol: 1e-8,
        }
    }
}

impl SchemeParams {
    pub fn ideal() -> Self {
        SchemeParams {
            mode: SourceMode::Ideal,
            ..Self::default()
        }
    }

    pub fn with_phi(&self, phi: f64) -> Self {
        SchemeParams { phi, ..self.clone() }
    }

    pub fn with_mode(&self, mode: SourceMode) -> Self {
        SchemeParams { mode, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 2.0) {
            return Err(Error::arg(format!(
                "|alpha| must exceed 2 (the reference chain needs |alpha|^2 > 4), got {}",
                self.alpha
            )));
        }
        if !self.phi.is_finite() {
            return Err(Error::arg("phi must be finite"));
        }
        if !(self.tail_threshold > 0.0 && self.tail_threshold < 1.0) {
            return Err(Error::arg("tail threshold must lie in (0, 1)"));
        }
        if !(self.prune_eps.is_finite() && self.prune_eps >= 0.0) {
            return Err(Error::arg("prune_eps must be finite and non-negative"));
        }
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return Err(Error::arg("tol must be finite and non-negative"));
        }
        Ok(())
    }

    pub fn run_options(&self) -> RunOptions {
        RunOptions {
            tail_threshold: self.tail_threshold,
            cutoff_pad: self.cutoff_pad,
            prune_eps: self.prune_eps,
        }
    }

    /// `e^{iφ}`.
    pub fn phase(&self) -> C64 {
        C64::cis(self.phi)
    }

    /// The coherent input amplitude `|α| e^{iφ}`.
    pub fn input_amplitude(&self) -> C64 {
        self.phase() * self.alpha
    }

    /// Cutoff of the coherent input before padding.
    pub fn input_cutoff(&self) -> u32 {
        self.cutoff
            .unwrap_or_else(|| default_cutoff(self.alpha, self.tail_threshold))
    }
}

/// Quantum scissors: coherent input truncated to its {0, 1} component in
/// mode `out`, with the left-over BS1 output in mode `ref`. Conditions on
/// one photon at A and none at B.
pub fn scissors_circuit(p: &SchemeParams) -> Circuit {
    let t1 = 2f64.sqrt() / p.alpha;
    Circuit::new("scissors")
        .then(CircuitStep::add_coherent("s", p.input_amplitude(), p.cutoff))
        .then(CircuitStep::add_fock(REF, 0))
        .then(CircuitStep::beam_splitter("s", REF, t1))
        .then(CircuitStep::add_fock("p", 1))
        .then(CircuitStep::add_fock(OUT, 0))
        .then(CircuitStep::beam_splitter("p", OUT, FRAC_1_SQRT_2))
        .then(CircuitStep::beam_splitter_to("s", "p", FRAC_1_SQRT_2, "A", "B"))
        .then(CircuitStep::condition("A", 1))
        .then(CircuitStep::condition("B", 0))
}

/// 50:50 splitter taking the one-photon source in `out` to paths `u1`, `u2`.
pub fn source_circuit() -> Circuit {
    Circuit::new("source")
        .then(CircuitStep::add_fock(U1, 0))
        .then(CircuitStep::beam_splitter_to(U1, OUT, FRAC_1_SQRT_2, U1, U2))
}

/// Splits one unit-amplitude oscillator for Alice and one for Bob off the
/// reference beam in `ref`; what is left ends in `rem`.
pub fn reference_chain_circuit(p: &SchemeParams) -> Circuit {
    let a2 = p.alpha * p.alpha;
    // Reflection amplitudes 1/√(|α|²−2) and 1/√(|α|²−3).
    let t1 = ((a2 - 3.0) / (a2 - 2.0)).sqrt();
    let t2 = ((a2 - 4.0) / (a2 - 3.0)).sqrt();
    Circuit::new("reference chain")
        .then(CircuitStep::add_fock(LO_A, 0))
        .then(CircuitStep::beam_splitter(REF, LO_A, t1))
        .then(CircuitStep::mirror(REF))
        .then(CircuitStep::add_fock(LO_B, 0))
        .then(CircuitStep::beam_splitter_to(REF, LO_B, t2, REM, LO_B))
        .then(CircuitStep::phase(LO_B, PI))
}

/// The whole preparation: scissors, source splitter and reference chain,
/// ending on modes `u1, u2, lo_a, lo_b, rem` (after reordering).
pub fn full_preparation_circuit(p: &SchemeParams) -> Circuit {
    scissors_circuit(p)
        .extend(&source_circuit())
        .extend(&reference_chain_circuit(p))
}

/// `(|0⟩ + √2 e^{iφ}|1⟩)/√3` in a single mode labelled `out`.
pub fn ideal_partlycle(phi: f64) -> PureState {
    let k = 1.0 / 3f64.sqrt();
    PureState::from_terms(
        &[OUT],
        &[1],
        vec![
            (vec![0], C64::new(k, 0.0)),
            (vec![1], C64::cis(phi) * (2f64.sqrt() * k)),
        ],
    )
    .expect("valid partlycle")
}

#[derive(Clone, Debug)]
pub struct ScissorsOutput {
    /// Probability of the (A = 1, B = 0) record.
    pub success_prob: f64,
    pub out: PureState,
    pub reference: PureState,
    pub trace: ExecutionTrace,
}

pub fn build_scissors(p: &SchemeParams) -> Result<ScissorsOutput> {
    if !(p.alpha.is_finite() && p.alpha >= 2f64.sqrt()) {
        return Err(Error::arg(format!("scissors need |alpha| >= sqrt(2), got {}", p.alpha)));
    }
    let r = run(&scissors_circuit(p), &p.run_options())?;
    let split = factorize(&r.final_state, &[r.final_state.mode_id(OUT)?], FACTOR_TOL)?;
    Ok(ScissorsOutput {
        success_prob: r.trace.cumulative(),
        out: split.factor,
        reference: split.remaining,
        trace: r.trace,
    })
}

/// Apply the source splitter to a single-mode state with support on {0, 1}.
/// Returns a state on modes `(u1, u2)`.
pub fn hardy_source(partlycle: &PureState) -> Result<PureState> {
    if partlycle.num_modes() != 1 {
        return Err(Error::arg("the source must be a single-mode state"));
    }
    if partlycle.iter().any(|(k, _)| k[0] > 1) {
        return Err(Error::arg("the source has support beyond one photon"));
    }
    let label = partlycle.labels()[0].to_string();
    let s = partlycle.clone().relabel(&label, OUT)?;
    let r = run_on(&source_circuit(), s, &RunOptions::default())?;
    r.final_state.reordered(&[U1, U2])
}

#[derive(Clone, Debug)]
pub struct ReferenceChain {
    pub lo_alice: PureState,
    pub lo_bob: PureState,
    pub remainder: PureState,
}

/// Run the reference chain on a single-mode reference beam and split the
/// three outputs into separate states. Fails if any output is correlated
/// with the others beyond [`FACTOR_TOL`].
pub fn build_reference_chain(reference: &PureState, p: &SchemeParams) -> Result<ReferenceChain> {
    if !(p.alpha.is_finite() && p.alpha > 2.0) {
        return Err(Error::arg(format!("the reference chain needs |alpha| > 2, got {}", p.alpha)));
    }
    if reference.num_modes() != 1 {
        return Err(Error::arg("the reference must be a single-mode state"));
    }
    let label = reference.labels()[0].to_string();
    let s = reference.clone().relabel(&label, REF)?;
    let r = run_on(&reference_chain_circuit(p), s, &p.run_options())?;
    let st = r.final_state;
    let a = factorize(&st, &[st.mode_id(LO_A)?], FACTOR_TOL)?;
    let rest = a.remaining;
    let b = factorize(&rest, &[rest.mode_id(LO_B)?], FACTOR_TOL)?;
    Ok(ReferenceChain {
        lo_alice: a.factor,
        lo_bob: b.factor,
        remainder: b.remaining,
    })
}

/// Joint state just before the homodyne splitters.
#[derive(Clone, Debug)]
pub struct PreDetection {
    /// Modes `u1, u2, lo_a, lo_b` and, in full mode, `rem`.
    pub state: PureState,
    /// Post-selection record of the preparation.
    pub trace: ExecutionTrace,
}

impl PreDetection {
    pub fn has_remainder(&self) -> bool {
        self.state.mode_id(REM).is_ok()
    }

    /// Mode ids of the factors `(u1, u2)`, `lo_a`, `lo_b` and, if present, `rem`.
    pub fn factor_groups(&self) -> Result<Vec<Vec<ModeId>>> {
        let s = &self.state;
        let mut groups = vec![
            vec![s.mode_id(U1)?, s.mode_id(U2)?],
            vec![s.mode_id(LO_A)?],
            vec![s.mode_id(LO_B)?],
        ];
        if let Ok(id) = s.mode_id(REM) {
            groups.push(vec![id]);
        }
        Ok(groups)
    }
}

pub fn pre_detection_state(p: &SchemeParams) -> Result<PreDetection> {
    p.validate()?;
    match p.mode {
        SourceMode::Full => {
            let r = run(&full_preparation_circuit(p), &p.run_options())?;
            Ok(PreDetection {
                state: r.final_state.reordered(&[U1, U2, LO_A, LO_B, REM])?,
                trace: r.trace,
            })
        }
        SourceMode::Ideal => pre_detection_with_source(&ideal_partlycle(p.phi), p),
    }
}

/// Ideal-mode preparation with an arbitrary single-mode source state and
/// the exact oscillators `|−e^{iφ}⟩` (Alice) and `|i e^{iφ}⟩` (Bob).
pub fn pre_detection_with_source(partlycle: &PureState, p: &SchemeParams) -> Result<PreDetection> {
    p.validate()?;
    let e = p.phase();
    // Oscillator cutoffs always follow the tail rule; `cutoff` only applies
    // to the coherent input of the full scheme.
    let los = Circuit::new("ideal oscillators")
        .then(CircuitStep::add_coherent(LO_A, -e, None))
        .then(CircuitStep::add_coherent(LO_B, C64::new(0.0, 1.0) * e, None));
    let source = hardy_source(partlycle)?;
    let r = run_on(&los, source, &p.run_options())?;
    Ok(PreDetection {
        state: r.final_state.reordered(&[U1, U2, LO_A, LO_B])?,
        trace: r.trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn params_validation() {
        assert!(SchemeParams::default().validate().is_ok());
        let bad = SchemeParams {
            alpha: 1.5,
            ..SchemeParams::default()
        };
        assert!(bad.validate().is_err());
        let bad = SchemeParams {
            tol: -1.0,
            ..SchemeParams::default()
        };
        assert!(bad.validate().is_err());
        assert_eq!("ideal".parse::<SourceMode>().unwrap(), SourceMode::Ideal);
        assert!("both".parse::<SourceMode>().is_err());
    }

    #[test]
    fn source_rejects_multiphoton_input() {
        let two = PureState::fock_state(&[2], &[2]).unwrap();
        assert!(hardy_source(&two).is_err());
        let vac = PureState::vacuum(&["x"], &[1]).unwrap();
        let out = hardy_source(&vac).unwrap();
        assert_eq!(out.labels(), vec![U1, U2]);
        assert_eq!(out.amplitude(&[0, 0]), C64::new(1.0, 0.0));
    }

    #[test]
    fn ideal_partlycle_is_normalized() {
        assert_abs_diff_eq!(ideal_partlycle(0.4).norm_sqr(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn circuits_validate() {
        let p = SchemeParams::default();
        assert!(crate::circuit::validate(&full_preparation_circuit(&p)).is_empty());
        assert!(crate::circuit::validate(&scissors_circuit(&p)).is_empty());
    }
}
