//! Experiment harness for the NOMA / massive-MIMO spectral-efficiency
//! library: TOML experiment specs, named presets, a deterministic Monte
//! Carlo runner, and CSV/manifest persistence.
//!
//! The flow is: an [`config::ExperimentSpec`] (from a preset or a TOML
//! file) resolves into a [`config::RunPlan`]; [`runner`] executes it
//! (drops, trials, schemes) and aggregates per-UE spectral efficiencies;
//! [`output`] serializes the results. Everything downstream of the seed
//! is deterministic, including under `--threads`.

pub mod config;
pub mod network;
pub mod output;
pub mod presets;
pub mod runner;
pub mod seeds;
