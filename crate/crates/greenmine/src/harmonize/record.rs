//! The harmonized analysis row and its construction from raw entry + card.

use std::collections::BTreeMap;

use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::card::{extract_metrics_with, CardMetadata, TrainingType};
use crate::registry::RawModelEntry;

use super::overrides::{ModelOverrides, OverrideValue};
use super::{harmonize_co2, map_domain, Domain, HarmonizeConfig, HarmonizeError};

/// One harmonized analysis row. Serialized field names are the export
/// contract for the table files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRecord {
    pub model_id: String,
    /// Harmonized emissions in grams of CO2e; present iff the model reports.
    pub co2_grams: Option<f64>,
    pub co2_reported: bool,
    pub auto_trained: bool,
    pub domain: Domain,
    pub model_size_bytes: Option<f64>,
    pub dataset_size_bytes: Option<f64>,
    pub training_type: Option<TrainingType>,
    pub geographical_location: Option<String>,
    pub hardware_used: Option<String>,
    /// Metric name to value in [0, 1].
    pub metrics: BTreeMap<String, f64>,
    pub downloads: u64,
    pub created_at: Option<DateTime<Utc>>,
    /// `YYYY-MM` derived from `created_at`; absent when the timestamp did
    /// not parse.
    pub year_month: Option<String>,
    pub library_name: Option<String>,
    /// Tags surviving the corpus-level filter pass.
    pub kept_tags: Vec<String>,
    /// Fields whose value came from a manual-curation override; kept out of
    /// the table exports, recorded in the audit log.
    #[serde(skip)]
    pub provenance: BTreeMap<String, String>,
}

impl ModelRecord {
    pub fn empty(model_id: &str) -> Self {
        ModelRecord {
            model_id: model_id.to_string(),
            co2_grams: None,
            co2_reported: false,
            auto_trained: false,
            domain: Domain::NoTag,
            model_size_bytes: None,
            dataset_size_bytes: None,
            training_type: None,
            geographical_location: None,
            hardware_used: None,
            metrics: BTreeMap::new(),
            downloads: 0,
            created_at: None,
            year_month: None,
            library_name: None,
            kept_tags: Vec::new(),
            provenance: BTreeMap::new(),
        }
    }

    /// Type-invariant check used by the pipeline after filtering.
    pub fn validate(&self) -> Result<(), String> {
        if self.model_id.is_empty() {
            return Err("empty model_id".into());
        }
        if self.co2_reported != self.co2_grams.is_some() {
            return Err(format!("{}: co2_reported flag inconsistent", self.model_id));
        }
        if let Some(v) = self.co2_grams {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("{}: co2_grams {v} not positive", self.model_id));
            }
        }
        if let Some(ym) = &self.year_month {
            let ok = ym.len() == 7
                && ym.as_bytes()[4] == b'-'
                && ym[..4].chars().all(|c| c.is_ascii_digit())
                && ym[5..].chars().all(|c| c.is_ascii_digit());
            if !ok {
                return Err(format!("{}: year_month {ym:?} not YYYY-MM", self.model_id));
            }
        }
        for (name, value) in &self.metrics {
            if !(0.0..=1.0).contains(value) {
                return Err(format!("{}: metric {name}={value} outside [0,1]", self.model_id));
            }
        }
        Ok(())
    }
}

/// Lenient timestamp parse: RFC 3339, then naive datetime, then plain date.
pub fn parse_created_at(raw: &str) -> Option<DateTime<Utc>> {
    if let Ok(dt) = DateTime::parse_from_rfc3339(raw) {
        return Some(dt.with_timezone(&Utc));
    }
    if let Ok(dt) = NaiveDateTime::parse_from_str(raw, "%Y-%m-%dT%H:%M:%S%.f") {
        return Some(dt.and_utc());
    }
    if let Ok(d) = NaiveDate::parse_from_str(raw, "%Y-%m-%d") {
        return Some(d.and_hms_opt(0, 0, 0)?.and_utc());
    }
    None
}

fn detect_auto_trained(entry: &RawModelEntry, card: &CardMetadata) -> bool {
    let tag_hit = |tags: &[String]| tags.iter().any(|t| t.eq_ignore_ascii_case("autotrain"));
    if tag_hit(&entry.tags) || tag_hit(&card.tags_declared) {
        return true;
    }
    card.emissions_block
        .as_ref()
        .and_then(|b| b.emissions_source.as_deref())
        .map(|s| s.to_lowercase().contains("autotrain"))
        .unwrap_or(false)
}

fn model_info_number(card: &CardMetadata, key: &str) -> Option<f64> {
    card.extra_fields.get("model_info")?.get(key)?.as_f64().filter(|v| v.is_finite())
}

// Bounded-metric percentage convention, applied to structured declarations
// the same way the regex extractor applies it to text matches.
fn normalize_metric(value: f64) -> Option<f64> {
    if !value.is_finite() || value < 0.0 || value > 100.0 {
        return None;
    }
    Some(if value > 1.0 { value / 100.0 } else { value })
}

/// Builds one harmonized record. Override fields win over parsed fields and
/// are tracked in `provenance`. Returns warnings for recoverable problems
/// (unparseable timestamps, malformed override values).
pub fn build_record(
    entry: &RawModelEntry,
    card: &CardMetadata,
    overrides: Option<&ModelOverrides>,
    config: &HarmonizeConfig,
) -> Result<(ModelRecord, Vec<String>), HarmonizeError> {
    if entry.model_id.is_empty() {
        return Err(HarmonizeError::EmptyModelId);
    }
    let mut warnings = Vec::new();
    let mut record = ModelRecord::empty(&entry.model_id);

    // emission harmonization
    if let Some(block) = &card.emissions_block {
        if let Some(value) = block.emissions_value {
            match harmonize_co2(value, block.emissions_unit) {
                Ok(grams) => record.co2_grams = Some(grams),
                Err(e) => warnings.push(format!("{}: {e}", entry.model_id)),
            }
        }
        record.training_type = block.training_type;
        record.geographical_location = block.geographical_location.clone();
        record.hardware_used = block.hardware_used.clone();
    }

    // metrics: structured declarations win over free-text extraction
    let mut metrics: BTreeMap<String, f64> = BTreeMap::new();
    if let Some(text) = &entry.card_text {
        metrics = extract_metrics_with(text, &config.metric_catalog);
    }
    for (name, value) in &card.declared_metrics {
        match normalize_metric(*value) {
            Some(v) => {
                metrics.insert(name.clone(), v);
            }
            None => warnings.push(format!(
                "{}: declared metric {name}={value} outside [0,100], ignored",
                entry.model_id
            )),
        }
    }
    metrics.retain(|_, v| (0.0..=1.0).contains(v));
    record.metrics = metrics;

    record.model_size_bytes = model_info_number(card, "model_file_size");
    record.dataset_size_bytes = model_info_number(card, "datasets_size");
    record.downloads = entry.downloads;
    record.library_name = entry.library_name.clone();
    record.auto_trained = detect_auto_trained(entry, card);

    // domain over the union of registry and card-declared tags
    let mut tags = entry.tags.clone();
    for tag in &card.tags_declared {
        if !tags.contains(tag) {
            tags.push(tag.clone());
        }
    }
    record.domain = map_domain(&tags, &config.domain_table);
    record.kept_tags = tags;

    if let Some(raw) = &entry.created_at {
        match parse_created_at(raw) {
            Some(dt) => {
                record.created_at = Some(dt);
                record.year_month = Some(dt.format("%Y-%m").to_string());
            }
            None => warnings
                .push(format!("{}: unparseable created_at {raw:?}, year_month absent", entry.model_id)),
        }
    }

    if let Some(model_overrides) = overrides {
        apply_overrides(&mut record, model_overrides, &mut warnings);
    }
    record.co2_reported = record.co2_grams.is_some();

    Ok((record, warnings))
}

fn apply_overrides(record: &mut ModelRecord, overrides: &ModelOverrides, warnings: &mut Vec<String>) {
    for (field, value) in &overrides.fields {
        let applied = match (field.as_str(), value) {
            ("co2_grams", OverrideValue::Number(v)) => {
                record.co2_grams = Some(*v);
                true
            }
            ("model_size_bytes", OverrideValue::Number(v)) => {
                record.model_size_bytes = Some(*v);
                true
            }
            ("dataset_size_bytes", OverrideValue::Number(v)) => {
                record.dataset_size_bytes = Some(*v);
                true
            }
            ("downloads", OverrideValue::Number(v)) if *v >= 0.0 => {
                record.downloads = *v as u64;
                true
            }
            ("training_type", OverrideValue::Text(s)) => match TrainingType::parse(s) {
                Some(t) => {
                    record.training_type = Some(t);
                    true
                }
                None => {
                    warnings.push(format!(
                        "{}: override training_type={s:?} not recognized",
                        record.model_id
                    ));
                    false
                }
            },
            ("geographical_location", OverrideValue::Text(s)) => {
                record.geographical_location = Some(s.clone());
                true
            }
            ("hardware_used", OverrideValue::Text(s)) => {
                record.hardware_used = Some(s.clone());
                true
            }
            ("library_name", OverrideValue::Text(s)) => {
                record.library_name = Some(s.clone());
                true
            }
            (name, OverrideValue::Number(v)) if name.starts_with("metrics.") => {
                let metric = name.trim_start_matches("metrics.").to_string();
                match normalize_metric(*v) {
                    Some(v) => {
                        record.metrics.insert(metric, v);
                        true
                    }
                    None => {
                        warnings.push(format!(
                            "{}: override {name}={v} outside [0,100], ignored",
                            record.model_id
                        ));
                        false
                    }
                }
            }
            (name, _) => {
                warnings.push(format!(
                    "{}: override field {name:?} unknown or wrong type, ignored",
                    record.model_id
                ));
                false
            }
        };
        if applied {
            record.provenance.insert(field.clone(), "manual".into());
        }
    }
}
