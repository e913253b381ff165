//! Pitch-wide space evaluation for soccer tracking and event data.
//!
//! The library computes two per-cell value surfaces from a tracked frame: a
//! scoring-opportunity baseline (goal-distance score x pitch control x
//! ball-centered Gaussian transition) and a positioning value that swaps in a
//! pitch-wide field value weight and per-area pass-destination kernels. On
//! top of that sit event/tracking ingestion, possession transition and
//! counter-attack detection, a synthetic data generator and the
//! nonparametric statistics used to compare sequences and teams.

pub mod analytics;
pub mod config;
pub mod error;
pub mod evaluator;
pub mod export;
pub mod geometry;
pub mod pipeline;
pub mod ppcf;
pub mod transition;
pub mod value;

pub use error::{Error, Result};
