//! Dueling-bandit policies and a seeded benchmark harness.
//!
//! - [`matrix`], [`winners`], [`regret`], [`theory`]: preference matrices,
//!   winner notions, per-step regret and closed-form bounds.
//! - [`mergedts`]: the MergeDTS policy and the batch machinery it shares with
//!   MergeRUCB.
//! - [`baselines`]: MergeRUCB, RUCB, DTS and Self-Sparring, plus
//!   [`baselines::PolicySpec`] for building any policy from JSON.
//! - [`environments`]: Cycle/Cycle2 and random Condorcet generators, duel
//!   sampling and assumption diagnostics.
//! - [`runner`]: seeded runs, batches, aggregation, exports and the
//!   per-batch comparison audit.
//!
//! Arms are 0-indexed throughout.

// Parameter checks are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod counts;
pub mod environments;
pub mod matrix;
pub mod mergedts;
pub mod policy;
pub mod regret;
pub mod runner;
pub mod sampling;
pub mod theory;
pub mod winners;

pub use counts::ComparisonCounts;
pub use matrix::{ArmId, PreferenceMatrix};
pub use policy::{DuelChoice, DuelPolicy, PolicyError};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
