//! Regex-based metric extraction from card text.
//!
//! The pattern catalog ships as a plain-text rule file (one
//! `name<TAB>pattern` per line) so new metric spellings can be added without
//! code changes; the embedded default covers accuracy, F1, Rouge1 and RougeL.

use std::collections::BTreeMap;

use regex::Regex;

use super::{split_front_matter, CardParseError};

/// Lowercase canonical metric names the default catalog extracts.
pub const CANONICAL_METRICS: [&str; 4] = ["accuracy", "f1", "rouge1", "rougel"];

const DEFAULT_RULES: &str = include_str!("../../config/metric_patterns.tsv");

/// Compiled metric extraction rules.
#[derive(Debug, Clone)]
pub struct MetricCatalog {
    rules: Vec<(String, Regex)>,
}

impl Default for MetricCatalog {
    fn default() -> Self {
        MetricCatalog::parse(DEFAULT_RULES).expect("embedded catalog is valid")
    }
}

impl MetricCatalog {
    /// Parses a rule file: `name<TAB>pattern` per line, `#` comments.
    pub fn parse(text: &str) -> Result<Self, CardParseError> {
        let mut rules = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, pattern) = line.split_once('\t').ok_or(CardParseError::MetricRule {
                line: idx + 1,
                message: "expected `name<TAB>pattern`".into(),
            })?;
            let regex = Regex::new(pattern).map_err(|e| CardParseError::MetricRule {
                line: idx + 1,
                message: e.to_string(),
            })?;
            if regex.captures_len() < 2 {
                return Err(CardParseError::MetricRule {
                    line: idx + 1,
                    message: "pattern needs one capture group for the value".into(),
                });
            }
            rules.push((name.trim().to_lowercase(), regex));
        }
        Ok(MetricCatalog { rules })
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CardParseError> {
        let text = std::fs::read_to_string(path).map_err(|e| CardParseError::MetricRule {
            line: 0,
            message: format!("{}: {e}", path.display()),
        })?;
        MetricCatalog::parse(&text)
    }

    pub fn metric_names(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self.rules.iter().map(|(n, _)| n.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        names
    }

    // Earliest match per metric within one region of text.
    fn scan(&self, text: &str) -> BTreeMap<String, f64> {
        let mut found: BTreeMap<String, (usize, f64)> = BTreeMap::new();
        for (name, regex) in &self.rules {
            for captures in regex.captures_iter(text) {
                let whole = captures.get(0).expect("match exists");
                let Some(value) = captures.get(1).and_then(|m| m.as_str().parse::<f64>().ok())
                else {
                    continue;
                };
                let Some(value) = rescale(name, value) else { continue };
                match found.get(name.as_str()) {
                    Some((pos, _)) if *pos <= whole.start() => {}
                    _ => {
                        found.insert(name.clone(), (whole.start(), value));
                    }
                }
            }
        }
        found.into_iter().map(|(name, (_, value))| (name, value)).collect()
    }
}

// Bounded metrics reported as percentages (value in (1, 100]) are rescaled
// to fractions; values above 100 are dropped as invalid.
fn rescale(name: &str, value: f64) -> Option<f64> {
    if !value.is_finite() {
        return None;
    }
    let bounded = CANONICAL_METRICS.contains(&name);
    if !bounded {
        return Some(value);
    }
    if value > 100.0 {
        None
    } else if value > 1.0 {
        Some(value / 100.0)
    } else {
        Some(value)
    }
}

/// Extracts metrics from a card using the default catalog. Scans both front
/// matter and body; on duplicates the front-matter value wins, otherwise the
/// first body occurrence.
pub fn extract_metrics(card_text: &str) -> BTreeMap<String, f64> {
    extract_metrics_with(card_text, &MetricCatalog::default())
}

/// [`extract_metrics`] with a caller-supplied rule catalog.
pub fn extract_metrics_with(card_text: &str, catalog: &MetricCatalog) -> BTreeMap<String, f64> {
    let (front, body) = match split_front_matter(card_text) {
        Ok(Some((front, body))) => (front, body),
        // malformed front matter: treat the whole card as body text
        Ok(None) | Err(_) => ("", card_text),
    };
    let mut metrics = catalog.scan(body);
    for (name, value) in catalog.scan(front) {
        metrics.insert(name, value);
    }
    metrics
}
