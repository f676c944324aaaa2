//! Manual-curation overrides: a CSV sidecar keyed by model_id so hand
//! curation stays replayable.

use std::collections::BTreeMap;
use std::path::Path;

use super::HarmonizeError;

#[derive(Debug, Clone, PartialEq)]
pub enum OverrideValue {
    Number(f64),
    Text(String),
}

/// Overrides for a single model: ordered (field, value) pairs.
#[derive(Debug, Clone, Default)]
pub struct ModelOverrides {
    pub fields: Vec<(String, OverrideValue)>,
}

/// All overrides, keyed by model_id.
#[derive(Debug, Clone, Default)]
pub struct CurationOverrides {
    by_model: BTreeMap<String, ModelOverrides>,
}

impl CurationOverrides {
    /// Parses the sidecar CSV with header `model_id,field,value`.
    pub fn parse_csv(text: &str) -> Result<Self, HarmonizeError> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        {
            let headers = reader.headers().map_err(|e| HarmonizeError::Override {
                line: 1,
                message: e.to_string(),
            })?;
            let expected = ["model_id", "field", "value"];
            if headers.iter().collect::<Vec<_>>() != expected {
                return Err(HarmonizeError::Override {
                    line: 1,
                    message: format!("header must be `model_id,field,value`, got {headers:?}"),
                });
            }
        }
        let mut by_model: BTreeMap<String, ModelOverrides> = BTreeMap::new();
        for (idx, row) in reader.records().enumerate() {
            let row = row.map_err(|e| HarmonizeError::Override {
                line: idx + 2,
                message: e.to_string(),
            })?;
            if row.len() != 3 {
                return Err(HarmonizeError::Override {
                    line: idx + 2,
                    message: format!("expected 3 columns, got {}", row.len()),
                });
            }
            let model_id = row[0].trim().to_string();
            if model_id.is_empty() {
                return Err(HarmonizeError::Override {
                    line: idx + 2,
                    message: "empty model_id".into(),
                });
            }
            let field = row[1].trim().to_string();
            let raw = row[2].trim();
            let value = match raw.parse::<f64>() {
                Ok(n) if n.is_finite() => OverrideValue::Number(n),
                _ => OverrideValue::Text(raw.to_string()),
            };
            by_model.entry(model_id).or_default().fields.push((field, value));
        }
        Ok(CurationOverrides { by_model })
    }

    pub fn load(path: &Path) -> Result<Self, HarmonizeError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarmonizeError::Override {
            line: 0,
            message: format!("{}: {e}", path.display()),
        })?;
        CurationOverrides::parse_csv(&text)
    }

    pub fn for_model(&self, model_id: &str) -> Option<&ModelOverrides> {
        self.by_model.get(model_id)
    }

    pub fn len(&self) -> usize {
        self.by_model.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_model.is_empty()
    }
}
