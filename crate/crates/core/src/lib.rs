//! Fock-space simulation of the single-photon Hardy nonlocality scheme.
//!
//! States are sparse maps from occupation tuples to complex amplitudes over
//! labelled, truncated modes ([`fock`]). Linear optical elements
//! ([`elements`]) act exactly on that representation, ideal counting
//! detectors and post-selection live in [`measurement`], and [`circuit`]
//! strings them together as declarative step lists.
//!
//! On top of the engine, [`scheme`] builds the optical layout (scissors
//! source, source splitter, oscillator chain), [`experiments`] runs the four
//! measurement settings and the Hardy witness, and [`lhv`] enumerates the
//! deterministic local strategies the witness rules out.
//!
//! ```
//! use hardy_sim::experiments::hardy_witness;
//! use hardy_sim::scheme::SchemeParams;
//!
//! let stats = hardy_witness(&SchemeParams::ideal()).unwrap();
//! assert!(stats.verdict);
//! assert!((stats.witness.p4 - (-2f64).exp() / 12.0).abs() < 1e-9);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod cli;
pub mod elements;
pub mod error;
pub mod experiments;
pub mod fock;
pub mod lhv;
pub mod measurement;
pub mod sampling;
pub mod scheme;

pub use error::{Error, Result};
pub use fock::{PureState, C64};
