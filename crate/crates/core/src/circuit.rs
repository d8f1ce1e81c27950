//! Circuits as data: an ordered list of steps that add modes, apply optical
//! elements, condition on detector outcomes and discard factorized modes.
//!
//! Circuits serialize to TOML:
//!
//! ```toml
//! name = "balanced splitter"
//!
//! [[steps]]
//! kind = "add_fock"
//! label = "a"
//! n = 1
//!
//! [[steps]]
//! kind = "add_fock"
//! label = "b"
//!
//! [[steps]]
//! kind = "beam_splitter"
//! a = "a"
//! b = "b"
//! t = 0.7071067811865476
//! out_a = "c"
//!
//! [[steps]]
//! kind = "condition"
//! mode = "c"
//! n = 0
//! ```

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::elements::{apply_beam_splitter, apply_mirror, apply_phase, BeamSplitter, Mirror, PhaseShift};
use crate::error::{Error, Result};
use crate::fock::{default_cutoff, PureState, C64};
use crate::measurement::{condition_on_count, drop_factorized_mode, ExecutionTrace};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CircuitStep {
    /// Append a mode holding `n` photons (cutoff `n`).
    AddFock {
        label: String,
        #[serde(default)]
        n: u32,
    },
    /// Append a truncated coherent mode. Without an explicit cutoff the
    /// default tail rule of the run options is used.
    AddCoherent {
        label: String,
        re: f64,
        #[serde(default)]
        im: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<u32>,
    },
    /// Beam splitter with transmission amplitude `t`; outputs may be renamed.
    BeamSplitter {
        a: String,
        b: String,
        t: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        out_a: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        out_b: Option<String>,
    },
    Phase { mode: String, theta: f64 },
    Mirror { mode: String },
    /// Detect `n` photons in `mode` and keep only that branch.
    Condition { mode: String, n: u32 },
    /// Remove a mode that must factor out of the state within `tol`.
    DropFactorized { mode: String, tol: f64 },
}

impl CircuitStep {
    pub fn kind(&self) -> &'static str {
        match self {
            CircuitStep::AddFock { .. } => "add_fock",
            CircuitStep::AddCoherent { .. } => "add_coherent",
            CircuitStep::BeamSplitter { .. } => "beam_splitter",
            CircuitStep::Phase { .. } => "phase",
            CircuitStep::Mirror { .. } => "mirror",
            CircuitStep::Condition { .. } => "condition",
            CircuitStep::DropFactorized { .. } => "drop_factorized",
        }
    }

    pub fn add_fock(label: &str, n: u32) -> Self {
        CircuitStep::AddFock {
            label: label.into(),
            n,
        }
    }

    pub fn add_coherent(label: &str, alpha: C64, cutoff: Option<u32>) -> Self {
        CircuitStep::AddCoherent {
            label: label.into(),
            re: alpha.re,
            im: alpha.im,
            cutoff,
        }
    }

    pub fn beam_splitter(a: &str, b: &str, t: f64) -> Self {
        CircuitStep::BeamSplitter {
            a: a.into(),
            b: b.into(),
            t,
            out_a: None,
            out_b: None,
        }
    }

    /// Beam splitter whose output modes are renamed to `out_a` / `out_b`.
    pub fn beam_splitter_to(a: &str, b: &str, t: f64, out_a: &str, out_b: &str) -> Self {
        CircuitStep::BeamSplitter {
            a: a.into(),
            b: b.into(),
            t,
            out_a: (out_a != a).then(|| out_a.into()),
            out_b: (out_b != b).then(|| out_b.into()),
        }
    }

    pub fn phase(mode: &str, theta: f64) -> Self {
        CircuitStep::Phase {
            mode: mode.into(),
            theta,
        }
    }

    pub fn mirror(mode: &str) -> Self {
        CircuitStep::Mirror { mode: mode.into() }
    }

    pub fn condition(mode: &str, n: u32) -> Self {
        CircuitStep::Condition {
            mode: mode.into(),
            n,
        }
    }

    pub fn drop_factorized(mode: &str, tol: f64) -> Self {
        CircuitStep::DropFactorized {
            mode: mode.into(),
            tol,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub name: String,
    #[serde(default)]
    pub steps: Vec<CircuitStep>,
}

impl Circuit {
    pub fn new(name: impl Into<String>) -> Self {
        Circuit {
            name: name.into(),
            steps: Vec::new(),
        }
    }

    pub fn push(&mut self, step: CircuitStep) -> &mut Self {
        self.steps.push(step);
        self
    }

    pub fn then(mut self, step: CircuitStep) -> Self {
        self.steps.push(step);
        self
    }

    pub fn extend(mut self, other: &Circuit) -> Self {
        self.steps.extend(other.steps.iter().cloned());
        self
    }

    pub fn from_toml(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("circuit serializes to TOML")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub step: usize,
    pub reason: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}: {}", self.step, self.reason)
    }
}

/// Check that every step only touches live modes and carries valid
/// parameters. An empty result means the circuit is well formed.
pub fn validate(c: &Circuit) -> Vec<Diagnostic> {
    validate_from::<&str>(c, &[])
}

/// Like [`validate`], for a circuit that starts from a state whose modes are
/// `initial`.
pub fn validate_from<S: AsRef<str>>(c: &Circuit, initial: &[S]) -> Vec<Diagnostic> {
    let mut live: Vec<String> = initial.iter().map(|s| s.as_ref().to_string()).collect();
    let mut consumed: HashSet<String> = HashSet::new();
    let mut diags = Vec::new();

    for (i, step) in c.steps.iter().enumerate() {
        let mut bad = |reason: String| diags.push(Diagnostic { step: i, reason });
        let need = |label: &str, live: &[String], bad: &mut dyn FnMut(String)| -> bool {
            if live.iter().any(|l| l == label) {
                true
            } else if consumed.contains(label) {
                bad(format!("mode `{label}` already consumed"));
                false
            } else {
                bad(format!("undeclared mode `{label}`"));
                false
            }
        };
        match step {
            CircuitStep::AddFock { label, .. } | CircuitStep::AddCoherent { label, .. } => {
                if label.is_empty() {
                    bad("empty mode label".into());
                } else if live.contains(label) {
                    bad(format!("mode `{label}` already exists"));
                } else if consumed.contains(label) {
                    bad(format!("mode `{label}` was consumed and cannot be reused"));
                } else {
                    live.push(label.clone());
                }
                if let CircuitStep::AddCoherent { re, im, .. } = step {
                    if !re.is_finite() || !im.is_finite() {
                        bad("coherent amplitude must be finite".into());
                    }
                }
            }
            CircuitStep::BeamSplitter { a, b, t, out_a, out_b } => {
                let ok_a = need(a, &live, &mut bad);
                let ok_b = need(b, &live, &mut bad);
                if a == b {
                    bad("beam splitter ports must differ".into());
                }
                if !(0.0..=1.0).contains(t) {
                    bad(format!("transmission amplitude {t} outside [0, 1]"));
                }
                if ok_a && ok_b && a != b {
                    let new_a = out_a.clone().unwrap_or_else(|| a.clone());
                    let new_b = out_b.clone().unwrap_or_else(|| b.clone());
                    let clash = |n: &String| {
                        n.is_empty()
                            || (live.iter().any(|l| l == n) && n != a && n != b)
                            || consumed.contains(n)
                    };
                    if new_a == new_b || clash(&new_a) || clash(&new_b) {
                        bad(format!("output labels `{new_a}`/`{new_b}` collide"));
                    } else {
                        for l in live.iter_mut() {
                            if l == a {
                                *l = new_a.clone();
                            } else if l == b {
                                *l = new_b.clone();
                            }
                        }
                    }
                }
            }
            CircuitStep::Phase { mode, theta } => {
                need(mode, &live, &mut bad);
                if !theta.is_finite() {
                    bad("phase must be finite".into());
                }
            }
            CircuitStep::Mirror { mode } => {
                need(mode, &live, &mut bad);
            }
            CircuitStep::Condition { mode, .. } | CircuitStep::DropFactorized { mode, .. } => {
                if need(mode, &live, &mut bad) {
                    live.retain(|l| l != mode);
                    consumed.insert(mode.clone());
                }
                if let CircuitStep::DropFactorized { tol, .. } = step {
                    if !(0.0..=1.0).contains(tol) {
                        bad(format!("tolerance {tol} outside [0, 1]"));
                    }
                }
            }
        }
    }
    diags
}

/// Numerical settings shared by every step of a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    /// Tail weight for the default coherent cutoff rule.
    pub tail_threshold: f64,
    /// Added to every coherent cutoff (explicit or rule-derived).
    pub cutoff_pad: u32,
    /// Entries with `|amp| < prune_eps` are removed after each element.
    pub prune_eps: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            tail_threshold: 1e-12,
            cutoff_pad: 0,
            prune_eps: 0.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub final_state: PureState,
    pub trace: ExecutionTrace,
    pub total_norm_deficit: f64,
    /// Factors removed by `drop_factorized` steps, in order.
    pub dropped: Vec<(String, PureState)>,
}

pub fn run(c: &Circuit, opts: &RunOptions) -> Result<RunResult> {
    run_on(c, PureState::scalar(), opts)
}

/// Execute `c` starting from `initial` instead of the empty scalar state.
pub fn run_on(c: &Circuit, initial: PureState, opts: &RunOptions) -> Result<RunResult> {
    let diags = validate_from(c, &initial.labels());
    if !diags.is_empty() {
        return Err(Error::InvalidCircuit {
            circuit: c.name.clone(),
            diagnostics: diags.iter().map(|d| d.to_string()).collect(),
        });
    }
    let mut state = initial;
    let mut trace = ExecutionTrace::new();
    let mut dropped = Vec::new();
    for (i, step) in c.steps.iter().enumerate() {
        state = execute(step, state, opts, &mut trace, &mut dropped).map_err(|e| Error::Step {
            step: i,
            kind: step.kind(),
            source: Box::new(e),
        })?;
    }
    let total_norm_deficit = state.norm_deficit();
    Ok(RunResult {
        final_state: state,
        trace,
        total_norm_deficit,
        dropped,
    })
}

fn execute(
    step: &CircuitStep,
    state: PureState,
    opts: &RunOptions,
    trace: &mut ExecutionTrace,
    dropped: &mut Vec<(String, PureState)>,
) -> Result<PureState> {
    let prune = |s: PureState| {
        if opts.prune_eps > 0.0 {
            s.pruned(opts.prune_eps)
        } else {
            s
        }
    };
    Ok(match step {
        CircuitStep::AddFock { label, n } => {
            let f = PureState::fock_state(&[*n], &[*n])?.with_labels(&[label])?;
            state.tensor(&f)?
        }
        CircuitStep::AddCoherent { label, re, im, cutoff } => {
            let alpha = C64::new(*re, *im);
            let base = cutoff.unwrap_or_else(|| default_cutoff(alpha.norm(), opts.tail_threshold));
            let coh = PureState::coherent(alpha, base + opts.cutoff_pad)?.with_labels(&[label])?;
            state.tensor(&coh)?
        }
        CircuitStep::BeamSplitter { a, b, t, out_a, out_b } => {
            let bs = BeamSplitter::new(*t, state.mode_id(a)?, state.mode_id(b)?)?;
            let mut out = prune(apply_beam_splitter(&state, &bs)?);
            if let Some(l) = out_a {
                out = out.relabel(a, l)?;
            }
            if let Some(l) = out_b {
                out = out.relabel(b, l)?;
            }
            out
        }
        CircuitStep::Phase { mode, theta } => {
            let ps = PhaseShift::new(*theta, state.mode_id(mode)?)?;
            prune(apply_phase(&state, &ps)?)
        }
        CircuitStep::Mirror { mode } => {
            let m = Mirror {
                port: state.mode_id(mode)?,
            };
            prune(apply_mirror(&state, &m)?)
        }
        CircuitStep::Condition { mode, n } => {
            let (p, rest) = condition_on_count(&state, state.mode_id(mode)?, *n)?;
            trace.record(format!("{mode} = {n}"), p);
            rest
        }
        CircuitStep::DropFactorized { mode, tol } => {
            let f = drop_factorized_mode(&state, state.mode_id(mode)?, *tol)?;
            trace.record(format!("drop {mode} (purity {:.17e})", f.purity), 1.0);
            dropped.push((mode.clone(), f.factor));
            f.remaining
        }
    })
}
