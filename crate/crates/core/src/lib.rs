//! Core of the `topocontro` controversy-detection pipeline.
//!
//! Everything in this crate is pure computation over in-memory values and
//! builds without `std` (an allocator is required). File formats, the post
//! store, parallel drivers and the command line live in the `topocontro`
//! crate.
//!
//! The pipeline, in order:
//!
//! * [`record`] and [`label`]: thread records and the upvote-ratio labeling rule.
//! * [`graph`]: the directed user–user reply graph, its undirected view,
//!   the post–comment tree and graph distance matrices.
//! * [`tda`]: Vietoris–Rips filtrations, persistence by boundary-matrix
//!   reduction over GF(2), and persistence images.
//! * [`motifs`]: the 13-class directed triad census.
//! * [`features`]: the f0–f4 feature blocks and their assembly.
//! * [`learn`]: AdaBoost over stumps, random forest, and an MLP.
//! * [`eval`]: training/testing scenarios, per-class F1 and the imbalance
//!   impact score.
//! * [`synth`]: a seeded generator of synthetic threads with a planted
//!   cycle signal.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(any(test, feature = "oracles"))]
extern crate std;

pub mod eval;
pub mod features;
pub mod graph;
pub mod label;
pub mod learn;
pub(crate) mod math;
pub mod motifs;
pub mod record;
pub mod rng;
pub mod synth;
pub mod tda;

#[cfg(any(test, feature = "oracles"))]
pub mod oracle;

pub use label::{Label, LabelConfig, LabelReason, LabelValue};
pub use record::{CommentRecord, ThreadRecord};
