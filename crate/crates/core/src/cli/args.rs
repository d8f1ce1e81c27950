use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::scheme::{SchemeParams, SourceMode};

#[derive(Debug, Parser)]
#[command(name = "hardy-sim", version, about = "Single-photon Hardy nonlocality simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run all four experiments and report the Hardy witness.
    Hardy {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Include the complete outcome tables, not only the coarse ones.
        #[arg(long)]
        full_tables: bool,
    },
    /// Write the outcome table of a single experiment.
    Experiment {
        /// Experiment number.
        #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
        n: u8,
        #[command(flatten)]
        scheme: SchemeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Repeat the Hardy run over a list of phases, amplitudes or cutoffs.
    Sweep {
        #[arg(long, value_enum)]
        axis: Axis,
        /// Comma-separated axis values. Cutoff values are integers,
        /// `default` or `default+K`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Vec<String>,
        /// Uniform phase grid of this many points (phi axis only).
        #[arg(long, conflicts_with = "values")]
        grid: Option<usize>,
        #[command(flatten)]
        scheme: SchemeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Draw finite-shot records from an experiment's exact distribution.
    Sample {
        /// Experiment to sample.
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u8).range(1..=4))]
        experiment: u8,
        /// Number of records to draw.
        #[arg(long)]
        shots: u64,
        /// Generator seed; the same seed gives the same records.
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        scheme: SchemeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a circuit described in a TOML file and report its count table.
    Circuit {
        /// Circuit description.
        file: PathBuf,
        /// Modes to count (default: every mode left at the end).
        #[arg(long, value_delimiter = ',')]
        measure: Vec<String>,
        #[arg(long)]
        prune_eps: Option<f64>,
        #[arg(long)]
        cutoff_pad: Option<u32>,
        #[arg(long)]
        tail: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    Phi,
    Alpha,
    Cutoff,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct SchemeArgs {
    /// TOML file with scheme parameters; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Magnitude of the coherent input amplitude.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Phase of the coherent input amplitude, radians.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Cutoff of the coherent input, overriding the tail rule.
    #[arg(long)]
    pub cutoff: Option<u32>,
    /// Added to every coherent cutoff.
    #[arg(long)]
    pub cutoff_pad: Option<u32>,
    /// Tail weight left out by the default cutoff rule.
    #[arg(long)]
    pub tail: Option<f64>,
    /// Drop amplitudes smaller than this after every step (0 keeps all).
    #[arg(long)]
    pub prune_eps: Option<f64>,
    /// Threshold for the Hardy verdict.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Ideal,
    Full,
}

impl From<ModeArg> for SourceMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Ideal => SourceMode::Ideal,
            ModeArg::Full => SourceMode::Full,
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Scheme parameters as they appear in a config file and in the params echo
/// of every document.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ConfigFile {
    alpha: Option<f64>,
    phi: Option<f64>,
    mode: Option<SourceMode>,
    cutoff: Option<u32>,
    cutoff_pad: Option<u32>,
    tail_threshold: Option<f64>,
    prune_eps: Option<f64>,
    tol: Option<f64>,
}

impl SchemeArgs {
    /// Defaults, then the config file, then explicit flags.
    pub fn resolve(&self) -> Result<SchemeParams, String> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
                toml::from_str::<ConfigFile>(&text)
                    .map_err(|e| format!("bad config {}: {e}", path.display()))?
            }
            None => ConfigFile::default(),
        };
        let d = SchemeParams::default();
        let p = SchemeParams {
            alpha: self.alpha.or(file.alpha).unwrap_or(d.alpha),
            phi: self.phi.or(file.phi).unwrap_or(d.phi),
            mode: self.mode.map(Into::into).or(file.mode).unwrap_or(d.mode),
            tail_threshold: self.tail.or(file.tail_threshold).unwrap_or(d.tail_threshold),
            cutoff: self.cutoff.or(file.cutoff),
            cutoff_pad: self.cutoff_pad.or(file.cutoff_pad).unwrap_or(d.cutoff_pad),
            prune_eps: self.prune_eps.or(file.prune_eps).unwrap_or(d.prune_eps),
            tol: self.tol.or(file.tol).unwrap_or(d.tol),
        };
        p.validate().map_err(|e| e.to_string())?;
        if p.cutoff == Some(0) {
            return Err("cutoff must be at least 1".into());
        }
        Ok(p)
    }
}

/// The directory an output file goes into must already exist.
pub fn check_out_path(out: Option<&Path>) -> Result<(), String> {
    let Some(path) = out else { return Ok(()) };
    if path.is_dir() {
        return Err(format!("output path {} is a directory", path.display()));
    }
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = parent {
        if !dir.is_dir() {
            return Err(format!("output directory {} does not exist", dir.display()));
        }
    }
    Ok(())
}
