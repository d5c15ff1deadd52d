//! Simulation models for code-domain NOMA layered on a massive MIMO uplink
//! and downlink.
//!
//! This crate is the math kernel behind the `noma-mimo` command-line
//! harness. It covers:
//!
//! - spatial correlation models (LoS, 2D/3D one-ring) and correlated
//!   Rayleigh channel sampling (`channel`),
//! - pilot and spreading-signature books: orthogonal, random ±1, sparse
//!   (`signatures`),
//! - MMSE channel estimation for arbitrary pilot sets, with an automatic
//!   fast path when the pilots are mutually orthogonal (`estimation`),
//! - receive combining and duality-based precoding over the spread domain
//!   (`transceive`),
//! - uplink/downlink spectral-efficiency evaluation, closed forms, and the
//!   two-user LoS case study (`se`),
//! - correlation-based UE grouping: dominant eigenspaces, chordal distance,
//!   k-means, and balanced assignment via a Hungarian solver (`grouping`).
//!
//! Network-wide parameters, link geometry, and UE drops live in `netconfig`.
//! All operations are deterministic given an explicit RNG handle; file
//! formats, CLI, and parallel orchestration are deliberately left to the
//! companion crate.

// `!(x > 0.0)` is used deliberately so that NaN counts as a violation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// index-based loops are clearer than iterator gymnastics in the places
// where several parallel arrays are walked together
#![allow(clippy::needless_range_loop)]

pub mod channel;
pub mod error;
pub mod estimation;
pub mod grouping;
pub mod linalg;
pub mod netconfig;
pub mod se;
pub mod signatures;
pub mod transceive;

pub use error::{Error, Result};
pub use linalg::{C64, CMat, CVec};
