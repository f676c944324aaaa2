//! Model-card parsing: front matter into structured metadata, emission
//! blocks in their legacy and extended forms, and regex-based metric
//! extraction from free text.

mod emissions;
mod metrics;

pub use emissions::{parse_emissions, EmissionMetadata, EmissionUnit, EnergyLabel, TrainingType};
pub use metrics::{extract_metrics, extract_metrics_with, MetricCatalog, CANONICAL_METRICS};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CardParseError {
    #[error("malformed front matter at line {line}: {message}")]
    FrontMatter { line: usize, message: String },
    #[error("negative emissions value {0}: corrupt card")]
    NegativeEmissions(f64),
    #[error("non-finite emissions value: corrupt card")]
    NonFiniteEmissions,
    #[error("invalid metric rule at line {line}: {message}")]
    MetricRule { line: usize, message: String },
}

/// Structured view of a model card's front matter.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CardMetadata {
    pub emissions_block: Option<EmissionMetadata>,
    /// Metric name (lowercase canonical) to value, as declared in structured
    /// metadata; free-text extraction lives in [`extract_metrics`].
    pub declared_metrics: BTreeMap<String, f64>,
    pub datasets_declared: Vec<String>,
    pub tags_declared: Vec<String>,
    /// Unknown top-level keys, preserved verbatim.
    pub extra_fields: BTreeMap<String, serde_json::Value>,
}

impl CardMetadata {
    pub fn is_empty(&self) -> bool {
        self.emissions_block.is_none()
            && self.declared_metrics.is_empty()
            && self.datasets_declared.is_empty()
            && self.tags_declared.is_empty()
            && self.extra_fields.is_empty()
    }
}

/// Splits a card into the front-matter block (without delimiters) and the
/// body. Returns `None` when the card has no leading `---` block.
///
/// The opening delimiter must be the first line; the closing delimiter is
/// the next line consisting of `---`.
pub fn split_front_matter(card_text: &str) -> Result<Option<(&str, &str)>, CardParseError> {
    let text = card_text.strip_prefix('\u{feff}').unwrap_or(card_text);
    let mut lines = text.split_inclusive('\n');
    match lines.next() {
        Some(first) if first.trim_end() == "---" => {}
        _ => return Ok(None),
    }
    let mut offset = text.find('\n').map(|i| i + 1).unwrap_or(text.len());
    let block_start = offset;
    let mut line_no = 1;
    for line in lines {
        line_no += 1;
        if line.trim_end() == "---" {
            let block = &text[block_start..offset];
            let body = &text[(offset + line.len()).min(text.len())..];
            return Ok(Some((block, body)));
        }
        offset += line.len();
    }
    Err(CardParseError::FrontMatter {
        line: line_no,
        message: "unbalanced delimiters: no closing `---` before end of file".into(),
    })
}

/// Parses the front-matter block of a card into [`CardMetadata`].
///
/// Absent or empty cards yield an empty `CardMetadata`; body-only cards are
/// not errors. Unknown keys are preserved in `extra_fields`.
pub fn parse_front_matter(card_text: &str) -> Result<CardMetadata, CardParseError> {
    let Some((block, _body)) = split_front_matter(card_text)? else {
        return Ok(CardMetadata::default());
    };
    if block.trim().is_empty() {
        return Ok(CardMetadata::default());
    }
    let value: serde_yaml::Value =
        serde_yaml::from_str(block).map_err(|e| CardParseError::FrontMatter {
            // +1 for the opening delimiter line
            line: e.location().map(|l| l.line() + 1).unwrap_or(2),
            message: e.to_string(),
        })?;
    let mapping = match value {
        serde_yaml::Value::Mapping(m) => m,
        serde_yaml::Value::Null => return Ok(CardMetadata::default()),
        _ => {
            return Err(CardParseError::FrontMatter {
                line: 2,
                message: "front matter root is not a mapping".into(),
            })
        }
    };

    let mut card = CardMetadata::default();
    for (key, val) in mapping {
        let key = yaml_key_to_string(&key);
        let json = yaml_to_json(&val);
        match key.as_str() {
            "co2_eq_emissions" => {
                card.emissions_block = Some(parse_emissions(&json)?);
            }
            "tags" => card.tags_declared = string_list(&json),
            "datasets" => card.datasets_declared = string_list(&json),
            _ if is_canonical_metric(&key) => {
                if let Some(v) = json.as_f64().filter(|v| v.is_finite()) {
                    card.declared_metrics.insert(key.to_lowercase(), v);
                } else {
                    card.extra_fields.insert(key, json);
                }
            }
            _ => {
                card.extra_fields.insert(key, json);
            }
        }
    }

    // metrics may also be declared under model_info.performance_metrics
    // (extended schema); top-level declarations take precedence
    if let Some(model_info) = card.extra_fields.get("model_info") {
        for (name, value) in performance_metrics_of(model_info) {
            card.declared_metrics.entry(name).or_insert(value);
        }
    }
    Ok(card)
}

/// Reconstructs a front-matter-only card from parsed metadata. Parsing the
/// result yields an equal `CardMetadata` (idempotence).
pub fn to_card_text(card: &CardMetadata) -> String {
    let mut root = serde_yaml::Mapping::new();
    if let Some(block) = &card.emissions_block {
        root.insert(
            serde_yaml::Value::String("co2_eq_emissions".into()),
            emissions::emissions_to_yaml(block),
        );
    }
    if !card.tags_declared.is_empty() {
        root.insert(
            serde_yaml::Value::String("tags".into()),
            serde_yaml::Value::Sequence(
                card.tags_declared.iter().map(|t| serde_yaml::Value::String(t.clone())).collect(),
            ),
        );
    }
    if !card.datasets_declared.is_empty() {
        root.insert(
            serde_yaml::Value::String("datasets".into()),
            serde_yaml::Value::Sequence(
                card.datasets_declared
                    .iter()
                    .map(|d| serde_yaml::Value::String(d.clone()))
                    .collect(),
            ),
        );
    }
    for (name, value) in &card.declared_metrics {
        root.insert(
            serde_yaml::Value::String(name.clone()),
            serde_yaml::Value::Number(serde_yaml::Number::from(*value)),
        );
    }
    for (key, value) in &card.extra_fields {
        root.insert(serde_yaml::Value::String(key.clone()), json_to_yaml(value));
    }
    if root.is_empty() {
        return String::new();
    }
    let yaml = serde_yaml::to_string(&serde_yaml::Value::Mapping(root)).expect("yaml serializes");
    format!("---\n{yaml}---\n")
}

fn is_canonical_metric(key: &str) -> bool {
    CANONICAL_METRICS.contains(&key.to_lowercase().as_str())
}

fn string_list(value: &serde_json::Value) -> Vec<String> {
    match value {
        serde_json::Value::String(s) => vec![s.clone()],
        serde_json::Value::Array(items) => {
            items.iter().filter_map(|v| v.as_str().map(str::to_string)).collect()
        }
        _ => Vec::new(),
    }
}

fn performance_metrics_of(model_info: &serde_json::Value) -> Vec<(String, f64)> {
    let mut found = Vec::new();
    let Some(list) = model_info.get("performance_metrics").and_then(|v| v.as_array()) else {
        return found;
    };
    for item in list {
        let Some(name) = item.get("metric").and_then(|v| v.as_str()) else { continue };
        let name = name.to_lowercase();
        if !CANONICAL_METRICS.contains(&name.as_str()) {
            continue;
        }
        if let Some(value) = item.get("value").and_then(|v| v.as_f64()).filter(|v| v.is_finite()) {
            found.push((name, value));
        }
    }
    found
}

fn yaml_key_to_string(key: &serde_yaml::Value) -> String {
    match key {
        serde_yaml::Value::String(s) => s.clone(),
        serde_yaml::Value::Number(n) => n.to_string(),
        serde_yaml::Value::Bool(b) => b.to_string(),
        other => serde_yaml::to_string(other).unwrap_or_default().trim().to_string(),
    }
}

pub(crate) fn yaml_to_json(value: &serde_yaml::Value) -> serde_json::Value {
    match value {
        serde_yaml::Value::Null => serde_json::Value::Null,
        serde_yaml::Value::Bool(b) => serde_json::Value::Bool(*b),
        serde_yaml::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                serde_json::Value::Number(i.into())
            } else if let Some(u) = n.as_u64() {
                serde_json::Value::Number(u.into())
            } else {
                serde_json::Number::from_f64(n.as_f64().unwrap_or(f64::NAN))
                    .map(serde_json::Value::Number)
                    .unwrap_or(serde_json::Value::Null)
            }
        }
        serde_yaml::Value::String(s) => serde_json::Value::String(s.clone()),
        serde_yaml::Value::Sequence(items) => {
            serde_json::Value::Array(items.iter().map(yaml_to_json).collect())
        }
        serde_yaml::Value::Mapping(map) => {
            let mut object = serde_json::Map::new();
            for (k, v) in map {
                object.insert(yaml_key_to_string(k), yaml_to_json(v));
            }
            serde_json::Value::Object(object)
        }
        serde_yaml::Value::Tagged(tagged) => yaml_to_json(&tagged.value),
    }
}

pub(crate) fn json_to_yaml(value: &serde_json::Value) -> serde_yaml::Value {
    match value {
        serde_json::Value::Null => serde_yaml::Value::Null,
        serde_json::Value::Bool(b) => serde_yaml::Value::Bool(*b),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                serde_yaml::Value::Number(i.into())
            } else if let Some(u) = n.as_u64() {
                serde_yaml::Value::Number(u.into())
            } else {
                serde_yaml::Value::Number(serde_yaml::Number::from(n.as_f64().unwrap_or(f64::NAN)))
            }
        }
        serde_json::Value::String(s) => serde_yaml::Value::String(s.clone()),
        serde_json::Value::Array(items) => {
            serde_yaml::Value::Sequence(items.iter().map(json_to_yaml).collect())
        }
        serde_json::Value::Object(map) => {
            let mut mapping = serde_yaml::Mapping::new();
            for (k, v) in map {
                mapping.insert(serde_yaml::Value::String(k.clone()), json_to_yaml(v));
            }
            serde_yaml::Value::Mapping(mapping)
        }
    }
}
