//! greenmine: mining and analysis of carbon-emission reporting in ML model
//! registries.
//!
//! The library is organized as a pipeline:
//!
//! - [`registry`] fetches model listings and cards from a registry REST API
//!   and freezes them into offline JSONL snapshots;
//! - [`card`] parses model-card front matter and free text into structured
//!   emission metadata and performance metrics;
//! - [`harmonize`] turns raw entries plus parsed cards into the harmonized
//!   analysis table (unit normalization, domain mapping, tag filtering);
//! - [`classify`] assigns the reporting-practice tier and the A-E carbon
//!   efficiency label;
//! - [`stats`] is the self-contained statistics engine (correlations,
//!   two-sample and normality tests, slope inference, Holm correction);
//! - [`lint`] validates card metadata against the extended reporting schema;
//! - [`report`] orchestrates the analysis battery and emits reproducible
//!   report artifacts.

pub mod card;
pub mod classify;
pub mod harmonize;
pub mod registry;
pub mod stats;

/// Version string recorded in snapshot headers and report artifacts.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
