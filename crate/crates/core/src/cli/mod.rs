//! Command-line front end.
//!
//! Exit codes: 0 success (or Hardy verdict true), 1 verdict false, 2
//! configuration error, 3 numerical error. Output is written only once the
//! whole computation has finished, so nothing reaches `--out` on failure.

mod args;
mod output;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::Path;

use clap::Parser;
use rayon::prelude::*;
use serde::Serialize;

pub use args::{Axis, Cli, Command, Format};
pub use output::{num, ResultDocument, SCHEMA, VERSION};

use crate::circuit::{run, Circuit, RunOptions};
use crate::error::Error;
use crate::experiments::{hardy_witness, max_table_difference, run_experiment_on, uniform_phases, Experiment, HardyStatistics};
use crate::measurement::joint_count_distribution;
use crate::sampling::{sample_counts, wilson_interval, GENERATOR, Z95};
use crate::scheme::{pre_detection_state, SchemeParams};
use args::{check_out_path, OutputArgs, SchemeArgs};
use output::{coarse_rows, hardy_csv, Raw, table_csv, to_json, ExperimentOutput, Num, ParamsEcho, TableDoc, TraceDoc};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERDICT_FALSE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug)]
enum Failure {
    Config(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e.root() {
            Error::Argument(_) | Error::InvalidCircuit { .. } => Failure::Config(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

type Outcome = Result<(String, i32), Failure>;

/// Parse `args` (including the program name), run, and return the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    execute(cli)
}

pub fn execute(cli: Cli) -> i32 {
    let out = match &cli.command {
        Command::Hardy { output, .. }
        | Command::Experiment { output, .. }
        | Command::Sweep { output, .. }
        | Command::Sample { output, .. }
        | Command::Circuit { output, .. } => output.out.clone(),
    };
    let result = check_out_path(out.as_deref())
        .map_err(Failure::Config)
        .and_then(|_| dispatch(&cli.command));
    match result {
        Ok((text, code)) => match write_output(out.as_deref(), &text) {
            Ok(()) => code,
            Err(e) => {
                eprintln!("error: cannot write output: {e}");
                EXIT_NUMERICAL
            }
        },
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            EXIT_CONFIG
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            EXIT_NUMERICAL
        }
    }
}

fn write_output(out: Option<&Path>, text: &str) -> std::io::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

fn dispatch(cmd: &Command) -> Outcome {
    match cmd {
        Command::Hardy {
            scheme,
            output,
            full_tables,
        } => cmd_hardy(&resolve(scheme)?, output, *full_tables),
        Command::Experiment { n, scheme, output } => cmd_experiment(&resolve(scheme)?, *n, output),
        Command::Sweep {
            axis,
            values,
            grid,
            scheme,
            output,
        } => cmd_sweep(&resolve(scheme)?, *axis, values, *grid, output),
        Command::Sample {
            experiment,
            shots,
            seed,
            scheme,
            output,
        } => cmd_sample(&resolve(scheme)?, *experiment, *shots, *seed, output),
        Command::Circuit {
            file,
            measure,
            prune_eps,
            cutoff_pad,
            tail,
            output,
        } => {
            let d = RunOptions::default();
            let opts = RunOptions {
                tail_threshold: tail.unwrap_or(d.tail_threshold),
                cutoff_pad: cutoff_pad.unwrap_or(d.cutoff_pad),
                prune_eps: prune_eps.unwrap_or(d.prune_eps),
            };
            cmd_circuit(file, measure, &opts, output)
        }
    }
}

fn resolve(s: &SchemeArgs) -> Result<SchemeParams, Failure> {
    s.resolve().map_err(Failure::Config)
}

fn json<T: Serialize>(command: &'static str, body: &T) -> Result<String, Failure> {
    to_json(command, body).map_err(|e| Failure::Numerical(e.to_string()))
}

fn verdict_code(v: bool) -> i32 {
    if v {
        EXIT_OK
    } else {
        EXIT_VERDICT_FALSE
    }
}

fn cmd_hardy(p: &SchemeParams, out: &OutputArgs, full_tables: bool) -> Outcome {
    let s = hardy_witness(p)?;
    let text = match out.format {
        Format::Json => json("hardy", &ResultDocument::new(p, &s, full_tables))?,
        Format::Csv => hardy_csv(&s),
    };
    Ok((text, verdict_code(s.verdict)))
}

fn cmd_experiment(p: &SchemeParams, n: u8, out: &OutputArgs) -> Outcome {
    let e = Experiment::new(n)?;
    let pre = pre_detection_state(p)?;
    let d = run_experiment_on(e, &pre, p)?;
    let text = match out.format {
        Format::Json => json(
            "experiment",
            &ExperimentOutput {
                params: p.into(),
                experiment: n,
                coarse: coarse_rows(e, &d),
                table: TableDoc::from(&d),
                trace: TraceDoc::from(&pre.trace),
                norm_deficit: Num(pre.state.norm_deficit()),
            },
        )?,
        Format::Csv => table_csv(&d),
    };
    Ok((text, EXIT_OK))
}

fn sweep_points(base: &SchemeParams, axis: Axis, values: &[String], grid: Option<usize>) -> Result<Vec<(String, SchemeParams)>, Failure> {
    let cfg = |m: String| Failure::Config(m);
    let raw: Vec<String> = match grid {
        Some(n) if axis != Axis::Phi => return Err(cfg(format!("--grid {n} only applies to the phi axis"))),
        Some(0) => return Err(cfg("--grid must be at least 1".into())),
        Some(n) => uniform_phases(n).into_iter().map(num).collect(),
        None => values.iter().map(|v| v.trim().to_string()).collect(),
    };
    if raw.is_empty() || raw.iter().any(|v| v.is_empty()) {
        return Err(cfg("sweep needs a non-empty list of values".into()));
    }
    raw.into_iter()
        .map(|v| {
            let float = || {
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| cfg(format!("bad sweep value `{v}`")))
            };
            let p = match axis {
                Axis::Phi => base.with_phi(float()?),
                Axis::Alpha => SchemeParams {
                    alpha: float()?,
                    ..base.clone()
                },
                Axis::Cutoff => {
                    let (cutoff, pad) = parse_cutoff(&v).ok_or_else(|| cfg(format!("bad cutoff value `{v}`")))?;
                    SchemeParams {
                        cutoff: cutoff.or(base.cutoff),
                        cutoff_pad: base.cutoff_pad + pad,
                        ..base.clone()
                    }
                }
            };
            p.validate()?;
            if p.cutoff == Some(0) {
                return Err(cfg("cutoff must be at least 1".into()));
            }
            Ok((v, p))
        })
        .collect()
}

/// `N`, `default` or `default+K`.
fn parse_cutoff(v: &str) -> Option<(Option<u32>, u32)> {
    if v == "default" {
        return Some((None, 0));
    }
    if let Some(k) = v.strip_prefix("default+") {
        return k.parse().ok().map(|k| (None, k));
    }
    v.parse().ok().map(|n| (Some(n), 0))
}

#[derive(Serialize)]
struct SweepPoint<'a> {
    value: &'a str,
    result: ResultDocument,
}

#[derive(Serialize)]
struct SweepSummary {
    /// Largest total-variation distance of the Experiment-4 table from the
    /// first point.
    max_tv_exp4: Num,
    /// Largest change of any table entry relative to the first point.
    max_abs_diff: Num,
    max_witness_diff: Num,
    all_verdicts: bool,
}

#[derive(Serialize)]
struct SweepDoc<'a> {
    axis: &'static str,
    params: ParamsEcho,
    points: Vec<SweepPoint<'a>>,
    summary: SweepSummary,
}

struct Deviation {
    tv: f64,
    abs: f64,
    witness: [f64; 4],
}

fn deviation(first: &HardyStatistics, s: &HardyStatistics) -> Result<Deviation, Error> {
    let e4 = Experiment::ALL[3];
    let (a, b) = (first.witness.as_array(), s.witness.as_array());
    Ok(Deviation {
        tv: first.experiment(e4).total_variation(s.experiment(e4))?,
        abs: max_table_difference(first, s)?,
        witness: std::array::from_fn(|i| (a[i] - b[i]).abs()),
    })
}

fn cmd_sweep(base: &SchemeParams, axis: Axis, values: &[String], grid: Option<usize>, out: &OutputArgs) -> Outcome {
    let points = sweep_points(base, axis, values, grid)?;
    let stats = points
        .par_iter()
        .map(|(_, p)| hardy_witness(p))
        .collect::<Result<Vec<_>, _>>()?;
    let devs = stats
        .iter()
        .map(|s| deviation(&stats[0], s))
        .collect::<Result<Vec<_>, _>>()?;
    let max = |f: &dyn Fn(&Deviation) -> f64| devs.iter().map(f).fold(0.0, f64::max);
    let max_w: [f64; 4] = std::array::from_fn(|i| max(&|d| d.witness[i]));
    let all_verdicts = stats.iter().all(|s| s.verdict);
    let text = match out.format {
        Format::Json => {
            let doc = SweepDoc {
                axis: match axis {
                    Axis::Phi => "phi",
                    Axis::Alpha => "alpha",
                    Axis::Cutoff => "cutoff",
                },
                params: base.into(),
                points: points
                    .iter()
                    .zip(&stats)
                    .map(|((v, p), s)| SweepPoint {
                        value: v,
                        result: ResultDocument::new(p, s, false),
                    })
                    .collect(),
                summary: SweepSummary {
                    max_tv_exp4: Num(max(&|d| d.tv)),
                    max_abs_diff: Num(max(&|d| d.abs)),
                    max_witness_diff: Num(max_w.iter().copied().fold(0.0, f64::max)),
                    all_verdicts,
                },
            };
            json("sweep", &doc)?
        }
        Format::Csv => {
            let mut s = String::from("value,p_joint_nn,p_zero_hn,p_zero_nh,p4,verdict,tv_exp4,max_abs_diff\n");
            for (((v, _), st), d) in points.iter().zip(&stats).zip(&devs) {
                let w = st.witness.as_array();
                writeln!(
                    s,
                    "{v},{},{},{},{},{},{},{}",
                    num(w[0]),
                    num(w[1]),
                    num(w[2]),
                    num(w[3]),
                    st.verdict,
                    num(d.tv),
                    num(d.abs)
                )
                .unwrap();
            }
            writeln!(
                s,
                "max,{},{},{},{},{},{},{}",
                num(max_w[0]),
                num(max_w[1]),
                num(max_w[2]),
                num(max_w[3]),
                all_verdicts,
                num(max(&|d| d.tv)),
                num(max(&|d| d.abs))
            )
            .unwrap();
            s
        }
    };
    Ok((text, verdict_code(all_verdicts)))
}

#[derive(Serialize)]
struct EventDoc {
    probability: Num,
    count: u64,
    frequency: Num,
    wilson_low: Num,
    wilson_high: Num,
}

#[derive(Serialize)]
struct SampleDoc {
    params: ParamsEcho,
    experiment: u8,
    shots: u64,
    seed: u64,
    generator: &'static str,
    columns: Vec<String>,
    rows: Vec<Raw>,
    hardy_event: EventDoc,
}

fn cmd_sample(p: &SchemeParams, n: u8, shots: u64, seed: u64, out: &OutputArgs) -> Outcome {
    if shots == 0 {
        return Err(Failure::Config("--shots must be at least 1".into()));
    }
    let e = Experiment::new(n)?;
    let pre = pre_detection_state(p)?;
    let d = run_experiment_on(e, &pre, p)?;
    let rec = sample_counts(&d, shots, seed)?;
    let event_count = rec.count_where(|k| e.is_witness_event(k));
    let interval = |k: u64| wilson_interval(k, shots, Z95);
    let freq = |k: u64| rec.frequency(k);
    let (elo, ehi) = interval(event_count);
    let text = match out.format {
        Format::Json => {
            let mut columns = d.labels().to_vec();
            columns.extend(["count", "frequency", "wilson_low", "wilson_high"].map(String::from));
            let rows = rec
                .counts
                .iter()
                .map(|(ks, c)| {
                    let c = *c;
                    let (lo, hi) = interval(c);
                    let mut r = String::from("[");
                    for k in ks {
                        write!(r, "{k},").unwrap();
                    }
                    write!(r, "{c},{},{},{}]", num(freq(c)), num(lo), num(hi)).unwrap();
                    Raw(r)
                })
                .collect();
            json(
                "sample",
                &SampleDoc {
                    params: p.into(),
                    experiment: n,
                    shots,
                    seed,
                    generator: GENERATOR,
                    columns,
                    rows,
                    hardy_event: EventDoc {
                        probability: Num(e.witness_event(&d)),
                        count: event_count,
                        frequency: Num(freq(event_count)),
                        wilson_low: Num(elo),
                        wilson_high: Num(ehi),
                    },
                },
            )?
        }
        Format::Csv => {
            let mut s = d.labels().join(",");
            s.push_str(",count,frequency,wilson_low,wilson_high\n");
            for (ks, c) in &rec.counts {
                let c = *c;
                let (lo, hi) = interval(c);
                for k in ks {
                    write!(s, "{k},").unwrap();
                }
                writeln!(s, "{c},{},{},{}", num(freq(c)), num(lo), num(hi)).unwrap();
            }
            s
        }
    };
    Ok((text, EXIT_OK))
}

#[derive(Serialize)]
struct CircuitDoc {
    circuit: String,
    dropped: Vec<String>,
    table: TableDoc,
    trace: TraceDoc,
    norm_deficit: Num,
}

fn cmd_circuit(file: &Path, measure: &[String], opts: &RunOptions, out: &OutputArgs) -> Outcome {
    let text = std::fs::read_to_string(file)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", file.display())))?;
    let c = Circuit::from_toml(&text).map_err(|e| Failure::Config(format!("bad circuit file {}: {e}", file.display())))?;
    if !(opts.tail_threshold > 0.0 && opts.tail_threshold < 1.0) {
        return Err(Failure::Config("tail threshold must lie in (0, 1)".into()));
    }
    if !(opts.prune_eps.is_finite() && opts.prune_eps >= 0.0) {
        return Err(Failure::Config("prune_eps must be finite and non-negative".into()));
    }
    let r = run(&c, opts)?;
    let s = &r.final_state;
    let ids = if measure.is_empty() {
        (0..s.num_modes()).map(crate::fock::ModeId).collect()
    } else {
        measure.iter().map(|m| s.mode_id(m)).collect::<Result<Vec<_>, _>>()?
    };
    let d = joint_count_distribution(s, &ids)?;
    let text = match out.format {
        Format::Json => json(
            "circuit",
            &CircuitDoc {
                circuit: c.name.clone(),
                dropped: r.dropped.iter().map(|(l, _)| l.clone()).collect(),
                table: TableDoc::from(&d),
                trace: TraceDoc::from(&r.trace),
                norm_deficit: Num(r.total_norm_deficit),
            },
        )?,
        Format::Csv => table_csv(&d),
    };
    Ok((text, EXIT_OK))
}
