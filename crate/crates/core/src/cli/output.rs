use std::fmt::Write as _;

use serde::ser::Error as _;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::experiments::{coarse_grain, Experiment, HardyStatistics, Witness};
use crate::measurement::{ExecutionTrace, OutcomeDistribution};
use crate::scheme::SchemeParams;

pub const TOOL: &str = "hardy-sim";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Bumped whenever a document field changes.
pub const SCHEMA: u32 = 1;

/// Decimal rendering with 17 significant digits.
pub fn num(x: f64) -> String {
    // Adding +0.0 turns -0.0 into 0.0.
    format!("{:.16e}", x + 0.0)
}

/// A float serialized through [`num`].
#[derive(Clone, Copy, Debug)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(S::Error::custom(format!("non-finite value {}", self.0)));
        }
        RawValue::from_string(num(self.0))
            .map_err(S::Error::custom)?
            .serialize(s)
    }
}

/// Pre-rendered JSON fragment.
pub(crate) struct Raw(pub(crate) String);

impl Serialize for Raw {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawValue::from_string(self.0.clone())
            .map_err(S::Error::custom)?
            .serialize(s)
    }
}

#[derive(Serialize)]
pub struct ParamsEcho {
    alpha: Num,
    phi: Num,
    mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    cutoff: Option<u32>,
    cutoff_pad: u32,
    tail_threshold: Num,
    prune_eps: Num,
    tol: Num,
}

impl From<&SchemeParams> for ParamsEcho {
    fn from(p: &SchemeParams) -> Self {
        ParamsEcho {
            alpha: Num(p.alpha),
            phi: Num(p.phi),
            mode: p.mode.to_string(),
            cutoff: p.cutoff,
            cutoff_pad: p.cutoff_pad,
            tail_threshold: Num(p.tail_threshold),
            prune_eps: Num(p.prune_eps),
            tol: Num(p.tol),
        }
    }
}

#[derive(Serialize)]
struct TraceStepDoc {
    event: String,
    probability: Num,
}

#[derive(Serialize)]
pub struct TraceDoc {
    steps: Vec<TraceStepDoc>,
    success_probability: Num,
    discarded_probability: Num,
}

impl From<&ExecutionTrace> for TraceDoc {
    fn from(t: &ExecutionTrace) -> Self {
        TraceDoc {
            steps: t
                .steps()
                .iter()
                .map(|s| TraceStepDoc {
                    event: s.description.clone(),
                    probability: Num(s.probability),
                })
                .collect(),
            success_probability: Num(t.cumulative()),
            discarded_probability: Num(1.0 - t.cumulative()),
        }
    }
}

#[derive(Serialize)]
pub struct CoarseRow {
    alice: &'static str,
    bob: &'static str,
    probability: Num,
}

/// Count table in column form: each row is the counts followed by the
/// probability.
#[derive(Serialize)]
pub struct TableDoc {
    columns: Vec<String>,
    rows: Vec<Raw>,
    residual: Num,
}

impl From<&OutcomeDistribution> for TableDoc {
    fn from(d: &OutcomeDistribution) -> Self {
        let mut columns = d.labels().to_vec();
        columns.push("probability".into());
        let rows = d
            .iter()
            .map(|(k, p)| {
                let mut s = String::from("[");
                for c in k {
                    write!(s, "{c},").unwrap();
                }
                s.push_str(&num(p));
                s.push(']');
                Raw(s)
            })
            .collect();
        TableDoc {
            columns,
            rows,
            residual: Num(d.residual()),
        }
    }
}

pub fn coarse_rows(e: Experiment, d: &OutcomeDistribution) -> Vec<CoarseRow> {
    coarse_grain(e, d)
        .into_iter()
        .map(|(a, b, p)| CoarseRow {
            alice: a.as_str(),
            bob: b.as_str(),
            probability: Num(p),
        })
        .collect()
}

#[derive(Serialize)]
struct ExperimentDoc {
    experiment: u8,
    alice: crate::experiments::Setting,
    bob: crate::experiments::Setting,
    coarse: Vec<CoarseRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    table: Option<TableDoc>,
}

#[derive(Serialize)]
struct WitnessDoc {
    p_joint_nn: Num,
    p_zero_hn: Num,
    p_zero_nh: Num,
    p4: Num,
}

impl From<&Witness> for WitnessDoc {
    fn from(w: &Witness) -> Self {
        WitnessDoc {
            p_joint_nn: Num(w.p_joint_nn),
            p_zero_hn: Num(w.p_zero_hn),
            p_zero_nh: Num(w.p_zero_nh),
            p4: Num(w.p4),
        }
    }
}

#[derive(Serialize)]
pub struct Header {
    tool: &'static str,
    version: &'static str,
    schema: u32,
    command: &'static str,
}

impl Header {
    pub fn new(command: &'static str) -> Self {
        Header {
            tool: TOOL,
            version: VERSION,
            schema: SCHEMA,
            command,
        }
    }
}

/// Everything one Hardy run produces.
#[derive(Serialize)]
pub struct ResultDocument {
    params: ParamsEcho,
    experiments: Vec<ExperimentDoc>,
    witness: WitnessDoc,
    verdict: bool,
    trace: TraceDoc,
    norm_deficit: Num,
}

impl ResultDocument {
    pub fn new(p: &SchemeParams, s: &HardyStatistics, full_tables: bool) -> Self {
        let experiments = Experiment::ALL
            .iter()
            .map(|&e| {
                let d = s.experiment(e);
                ExperimentDoc {
                    experiment: e.number(),
                    alice: e.alice(),
                    bob: e.bob(),
                    coarse: coarse_rows(e, d),
                    table: full_tables.then(|| TableDoc::from(d)),
                }
            })
            .collect();
        ResultDocument {
            params: p.into(),
            experiments,
            witness: (&s.witness).into(),
            verdict: s.verdict,
            trace: (&s.trace).into(),
            norm_deficit: Num(s.norm_deficit),
        }
    }
}

#[derive(Serialize)]
pub struct Tagged<'a, T: Serialize> {
    #[serde(flatten)]
    pub header: Header,
    #[serde(flatten)]
    pub body: &'a T,
}

pub fn to_json<T: Serialize>(command: &'static str, body: &T) -> serde_json::Result<String> {
    let mut s = serde_json::to_string_pretty(&Tagged {
        header: Header::new(command),
        body,
    })?;
    s.push('\n');
    Ok(s)
}

/// Key/value CSV of a Hardy run.
pub fn hardy_csv(s: &HardyStatistics) -> String {
    let mut out = String::from("quantity,value\n");
    let w = &s.witness;
    for (k, v) in [
        ("p_joint_nn", w.p_joint_nn),
        ("p_zero_hn", w.p_zero_hn),
        ("p_zero_nh", w.p_zero_nh),
        ("p4", w.p4),
    ] {
        writeln!(out, "{k},{}", num(v)).unwrap();
    }
    writeln!(out, "verdict,{}", s.verdict).unwrap();
    writeln!(out, "success_probability,{}", num(s.trace.cumulative())).unwrap();
    writeln!(out, "norm_deficit,{}", num(s.norm_deficit)).unwrap();
    for &e in &Experiment::ALL {
        for (a, b, p) in coarse_grain(e, s.experiment(e)) {
            writeln!(out, "exp{e}.{}.{},{}", a.as_str(), b.as_str(), num(p)).unwrap();
        }
    }
    out
}

/// Count table with a trailing probability column, rows in lexicographic
/// order of the counts.
pub fn table_csv(d: &OutcomeDistribution) -> String {
    let mut out = d.labels().join(",");
    out.push_str(",probability\n");
    for (k, p) in d.iter() {
        for c in k {
            write!(out, "{c},").unwrap();
        }
        out.push_str(&num(p));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
pub struct ExperimentOutput {
    pub params: ParamsEcho,
    pub experiment: u8,
    pub coarse: Vec<CoarseRow>,
    pub table: TableDoc,
    pub trace: TraceDoc,
    pub norm_deficit: Num,
}
