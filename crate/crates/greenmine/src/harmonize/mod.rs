//! Harmonization: raw entries plus parsed cards become the analysis table.
//!
//! Covers CO2e unit normalization, feature engineering (`co2_reported`,
//! `auto_trained`, `year_month`, `domain`), tag filtering, manual-curation
//! overrides, and the suspicious-record filter.

mod domain;
mod overrides;
mod record;
mod tags;

pub use domain::{map_domain, Domain, DomainTable};
pub use overrides::{CurationOverrides, ModelOverrides, OverrideValue};
pub use record::{build_record, parse_created_at, ModelRecord};
pub use tags::{filter_tags, DropReason, TagLists, TagStats, DEFAULT_TAG_THRESHOLD};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::card::{self, CardMetadata, EmissionUnit, MetricCatalog};
use crate::registry::RawModelEntry;

#[derive(Debug, Error)]
pub enum HarmonizeError {
    #[error("emission value must be finite and non-negative, got {0}")]
    InvalidEmissionValue(f64),
    #[error("empty model_id")]
    EmptyModelId,
    #[error("config file {path}: {message}")]
    Config { path: String, message: String },
    #[error("override file line {line}: {message}")]
    Override { line: usize, message: String },
}

/// Converts an emission value to grams. Unknown units are treated as grams,
/// matching the hub guideline that emissions are reported in gCO2e.
pub fn harmonize_co2(value: f64, unit: EmissionUnit) -> Result<f64, HarmonizeError> {
    if !value.is_finite() || value < 0.0 {
        return Err(HarmonizeError::InvalidEmissionValue(value));
    }
    Ok(match unit {
        EmissionUnit::Kilograms => value * 1000.0,
        EmissionUnit::Grams | EmissionUnit::Unknown => value,
    })
}

/// Why a record was partitioned out by [`filter_suspicious`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuspiciousReason {
    ZeroEmissions,
    NegativeEmissions,
    NonFiniteEmissions,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct DroppedRecord {
    pub record: ModelRecord,
    pub reason: SuspiciousReason,
}

/// Drops emission-reporting records with zero, negative, or non-finite CO2e.
/// Non-reporting records always pass. The partition is exhaustive:
/// `kept.len() + dropped.len() == input.len()`.
pub fn filter_suspicious(records: Vec<ModelRecord>) -> (Vec<ModelRecord>, Vec<DroppedRecord>) {
    let mut kept = Vec::with_capacity(records.len());
    let mut dropped = Vec::new();
    for record in records {
        match record.co2_grams {
            Some(v) if !v.is_finite() => {
                dropped.push(DroppedRecord { record, reason: SuspiciousReason::NonFiniteEmissions })
            }
            Some(v) if v == 0.0 => {
                dropped.push(DroppedRecord { record, reason: SuspiciousReason::ZeroEmissions })
            }
            Some(v) if v < 0.0 => {
                dropped.push(DroppedRecord { record, reason: SuspiciousReason::NegativeEmissions })
            }
            _ => kept.push(record),
        }
    }
    (kept, dropped)
}

/// Everything the corpus harmonization pass produces.
#[derive(Debug)]
pub struct HarmonizeOutcome {
    pub records: Vec<ModelRecord>,
    pub dropped: Vec<DroppedRecord>,
    pub tag_stats: Vec<TagStats>,
    pub warnings: Vec<String>,
}

/// Corpus-level configuration for harmonization.
pub struct HarmonizeConfig {
    pub domain_table: DomainTable,
    pub tag_lists: TagLists,
    pub tag_threshold: u64,
    pub metric_catalog: MetricCatalog,
}

impl Default for HarmonizeConfig {
    fn default() -> Self {
        HarmonizeConfig {
            domain_table: DomainTable::default(),
            tag_lists: TagLists::default(),
            tag_threshold: DEFAULT_TAG_THRESHOLD,
            metric_catalog: MetricCatalog::default(),
        }
    }
}

/// Runs the whole harmonization pass: per-record builds, global tag
/// filtering, and the suspicious-record partition. Records come out sorted
/// by `model_id`.
pub fn harmonize_corpus(
    entries: &[RawModelEntry],
    overrides: &CurationOverrides,
    config: &HarmonizeConfig,
) -> HarmonizeOutcome {
    let mut warnings = Vec::new();

    // global tag counts over the raw corpus
    let mut tag_counts: BTreeMap<String, u64> = BTreeMap::new();
    for entry in entries {
        for tag in &entry.tags {
            *tag_counts.entry(tag.clone()).or_insert(0) += 1;
        }
    }
    let tag_stats = filter_tags(&tag_counts, config.tag_threshold, &config.tag_lists);
    let kept_tags: std::collections::BTreeSet<&str> =
        tag_stats.iter().filter(|s| s.kept).map(|s| s.tag.as_str()).collect();

    let mut records = Vec::with_capacity(entries.len());
    for entry in entries {
        let card = match &entry.card_text {
            Some(text) => match card::parse_front_matter(text) {
                Ok(card) => card,
                Err(e) => {
                    warnings.push(format!("{}: card ignored: {e}", entry.model_id));
                    CardMetadata::default()
                }
            },
            None => CardMetadata::default(),
        };
        match build_record(entry, &card, overrides.for_model(&entry.model_id), config) {
            Ok((mut record, mut record_warnings)) => {
                record.kept_tags =
                    entry.tags.iter().filter(|t| kept_tags.contains(t.as_str())).cloned().collect();
                warnings.append(&mut record_warnings);
                records.push(record);
            }
            Err(e) => warnings.push(format!("{}: record skipped: {e}", entry.model_id)),
        }
    }
    records.sort_by(|a, b| a.model_id.cmp(&b.model_id));

    let (records, dropped) = filter_suspicious(records);
    HarmonizeOutcome { records, dropped, tag_stats, warnings }
}
