//! Emission metadata: the legacy scalar/string forms and the extended
//! mapping form of `co2_eq_emissions`.

use serde::{Deserialize, Serialize};

use super::CardParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmissionUnit {
    Grams,
    Kilograms,
    /// No unit declared; harmonization treats this as grams per the hub
    /// guideline.
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrainingType {
    Pretraining,
    FineTuning,
    PretrainingFineTuning,
}

impl TrainingType {
    pub fn parse(text: &str) -> Option<Self> {
        let norm: String = text
            .trim()
            .to_lowercase()
            .chars()
            .map(|c| if c == '_' || c == ' ' { '-' } else { c })
            .collect();
        match norm.as_str() {
            "pretraining" | "pre-training" => Some(TrainingType::Pretraining),
            "fine-tuning" | "finetuning" => Some(TrainingType::FineTuning),
            "pretraining+fine-tuning"
            | "pre-training+fine-tuning"
            | "pretraining-and-fine-tuning"
            | "pre-training-and-fine-tuning" => Some(TrainingType::PretrainingFineTuning),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            TrainingType::Pretraining => "pretraining",
            TrainingType::FineTuning => "fine-tuning",
            TrainingType::PretrainingFineTuning => "pretraining+fine-tuning",
        }
    }
}

/// Declared energy certification, shape-checked only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnergyLabel {
    pub source: String,
    pub classification: String,
}

impl EnergyLabel {
    pub fn is_certified(&self) -> bool {
        !self.source.trim().is_empty() && !self.classification.trim().is_empty()
    }
}

/// Structured emission metadata in the extended reporting shape.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EmissionMetadata {
    pub emissions_value: Option<f64>,
    pub emissions_unit: EmissionUnitField,
    pub energy_consumption_kwh: Option<f64>,
    pub emissions_source: Option<String>,
    pub training_type: Option<TrainingType>,
    pub geographical_location: Option<String>,
    pub hardware_used: Option<String>,
    pub cloud_service: Option<String>,
    pub training_time_s: Option<f64>,
    pub optimization_techniques: Option<String>,
    pub energy_label: Option<EnergyLabel>,
    /// Notes recorded while parsing (unparseable shapes, unknown units).
    pub parse_notes: Vec<String>,
    /// Original node when it could not be interpreted; preserved so
    /// serialization stays lossless.
    pub raw_unparsed: Option<serde_json::Value>,
}

// Wrapper so Default gives Unknown.
pub type EmissionUnitField = EmissionUnit;

impl Default for EmissionUnit {
    fn default() -> Self {
        EmissionUnit::Unknown
    }
}

/// Parses a `co2_eq_emissions` node: a bare number, a string like
/// `"0.5 kg"`, or the extended mapping. Any other shape yields an empty
/// block with a parse note, never a crash; negative or non-finite emission
/// values are validation errors.
pub fn parse_emissions(raw: &serde_json::Value) -> Result<EmissionMetadata, CardParseError> {
    let mut block = EmissionMetadata::default();
    match raw {
        serde_json::Value::Number(n) => {
            let value = n.as_f64().unwrap_or(f64::NAN);
            set_emissions_value(&mut block, value, EmissionUnit::Unknown)?;
        }
        serde_json::Value::String(s) => match parse_value_with_unit(s) {
            Some((value, unit)) => set_emissions_value(&mut block, value, unit)?,
            None => {
                block.parse_notes.push(format!("unparseable emissions string: {s:?}"));
                block.raw_unparsed = Some(raw.clone());
            }
        },
        serde_json::Value::Object(map) => {
            parse_extended(map, &mut block)?;
        }
        other => {
            block
                .parse_notes
                .push(format!("unsupported emissions node shape: {}", kind_name(other)));
            block.raw_unparsed = Some(raw.clone());
        }
    }
    Ok(block)
}

fn kind_name(value: &serde_json::Value) -> &'static str {
    match value {
        serde_json::Value::Null => "null",
        serde_json::Value::Bool(_) => "boolean",
        serde_json::Value::Number(_) => "number",
        serde_json::Value::String(_) => "string",
        serde_json::Value::Array(_) => "array",
        serde_json::Value::Object(_) => "mapping",
    }
}

fn set_emissions_value(
    block: &mut EmissionMetadata,
    value: f64,
    unit: EmissionUnit,
) -> Result<(), CardParseError> {
    if !value.is_finite() {
        return Err(CardParseError::NonFiniteEmissions);
    }
    if value < 0.0 {
        return Err(CardParseError::NegativeEmissions(value));
    }
    block.emissions_value = Some(value);
    block.emissions_unit = unit;
    Ok(())
}

fn parse_extended(
    map: &serde_json::Map<String, serde_json::Value>,
    block: &mut EmissionMetadata,
) -> Result<(), CardParseError> {
    for (key, value) in map {
        match key.as_str() {
            "emissions" => match value {
                serde_json::Value::Number(n) => {
                    set_emissions_value(block, n.as_f64().unwrap_or(f64::NAN), EmissionUnit::Unknown)?
                }
                serde_json::Value::String(s) => match parse_value_with_unit(s) {
                    Some((v, unit)) => set_emissions_value(block, v, unit)?,
                    None => block.parse_notes.push(format!("unparseable emissions string: {s:?}")),
                },
                other => block
                    .parse_notes
                    .push(format!("unsupported emissions value shape: {}", kind_name(other))),
            },
            "emissions_unit" | "unit" => {
                if let Some(unit) = value.as_str().and_then(parse_unit_token) {
                    block.emissions_unit = unit;
                }
            }
            "energy_consumption" => block.energy_consumption_kwh = number_of(value),
            "emissions_source" | "source" => block.emissions_source = string_of(value),
            "training_type" => {
                block.training_type = value.as_str().and_then(TrainingType::parse);
                if block.training_type.is_none() {
                    if let Some(s) = value.as_str() {
                        block.parse_notes.push(format!("unknown training_type: {s:?}"));
                    }
                }
            }
            "geographical_location" => block.geographical_location = string_of(value),
            "hardware_used" => block.hardware_used = string_of(value),
            "cloud_service" => block.cloud_service = string_of(value),
            "training_time" => block.training_time_s = number_of(value),
            "optimization_techniques" => block.optimization_techniques = string_of(value),
            "energy_label" => block.energy_label = parse_energy_label(value),
            _ => block.parse_notes.push(format!("unknown emissions field: {key}")),
        }
    }
    Ok(())
}

fn parse_energy_label(value: &serde_json::Value) -> Option<EnergyLabel> {
    let entry = match value {
        serde_json::Value::Array(items) => items.first()?,
        other => other,
    };
    let source = entry.get("energy_label_source")?.as_str()?.to_string();
    let classification = entry.get("energy_label_classification")?.as_str()?.to_string();
    Some(EnergyLabel { source, classification })
}

fn number_of(value: &serde_json::Value) -> Option<f64> {
    match value {
        serde_json::Value::Number(n) => n.as_f64().filter(|v| v.is_finite()),
        serde_json::Value::String(s) => parse_value_with_unit(s).map(|(v, _)| v),
        _ => None,
    }
}

fn string_of(value: &serde_json::Value) -> Option<String> {
    match value {
        serde_json::Value::String(s) => Some(s.clone()),
        serde_json::Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

/// Parses `"0.5 kg"`-style strings: a number with an optional unit token and
/// optional `CO2`/`CO2eq` suffix noise.
pub fn parse_value_with_unit(text: &str) -> Option<(f64, EmissionUnit)> {
    let trimmed = text.trim();
    let number_end = trimmed
        .char_indices()
        .take_while(|(i, c)| {
            c.is_ascii_digit()
                || *c == '.'
                || (*i == 0 && (*c == '-' || *c == '+'))
                || (*c == 'e' || *c == 'E')
                || (*i > 0
                    && (*c == '-' || *c == '+')
                    && matches!(trimmed.as_bytes()[*i - 1], b'e' | b'E'))
        })
        .map(|(i, c)| i + c.len_utf8())
        .last()?;
    let value: f64 = trimmed[..number_end].parse().ok()?;
    let rest = trimmed[number_end..].trim();
    if rest.is_empty() {
        return Some((value, EmissionUnit::Unknown));
    }
    let token = rest.split(|c: char| c.is_whitespace() || c == ',').next().unwrap_or("");
    let unit = parse_unit_token(token).unwrap_or(EmissionUnit::Unknown);
    Some((value, unit))
}

fn parse_unit_token(token: &str) -> Option<EmissionUnit> {
    // tolerate compound spellings like kgCO2e / gCO2eq
    let lower = token.to_lowercase();
    let bare = lower
        .trim_end_matches("co2eq")
        .trim_end_matches("co2e")
        .trim_end_matches("co2")
        .trim_matches(|c: char| !c.is_ascii_alphabetic());
    match bare {
        "kg" | "kilogram" | "kilograms" => Some(EmissionUnit::Kilograms),
        "g" | "gram" | "grams" => Some(EmissionUnit::Grams),
        _ => None,
    }
}

// Serialization counterpart used by `to_card_text`: reconstructs the
// lightest YAML shape that reparses to the same block.
pub(super) fn emissions_to_yaml(block: &EmissionMetadata) -> serde_yaml::Value {
    let extended = block.energy_consumption_kwh.is_some()
        || block.emissions_source.is_some()
        || block.training_type.is_some()
        || block.geographical_location.is_some()
        || block.hardware_used.is_some()
        || block.cloud_service.is_some()
        || block.training_time_s.is_some()
        || block.optimization_techniques.is_some()
        || block.energy_label.is_some();

    if !extended {
        if let Some(raw) = &block.raw_unparsed {
            return super::json_to_yaml(raw);
        }
        return match (block.emissions_value, block.emissions_unit) {
            (Some(v), EmissionUnit::Unknown) => {
                serde_yaml::Value::Number(serde_yaml::Number::from(v))
            }
            (Some(v), EmissionUnit::Grams) => serde_yaml::Value::String(format!("{v} g")),
            (Some(v), EmissionUnit::Kilograms) => serde_yaml::Value::String(format!("{v} kg")),
            (None, _) => serde_yaml::Value::Null,
        };
    }

    let mut map = serde_yaml::Mapping::new();
    let key = |s: &str| serde_yaml::Value::String(s.to_string());
    if let Some(v) = block.emissions_value {
        let value = match block.emissions_unit {
            EmissionUnit::Unknown => serde_yaml::Value::Number(serde_yaml::Number::from(v)),
            EmissionUnit::Grams => serde_yaml::Value::String(format!("{v} g")),
            EmissionUnit::Kilograms => serde_yaml::Value::String(format!("{v} kg")),
        };
        map.insert(key("emissions"), value);
    }
    if let Some(v) = block.energy_consumption_kwh {
        map.insert(key("energy_consumption"), serde_yaml::Value::Number(serde_yaml::Number::from(v)));
    }
    if let Some(s) = &block.emissions_source {
        map.insert(key("emissions_source"), serde_yaml::Value::String(s.clone()));
    }
    if let Some(t) = &block.training_type {
        map.insert(key("training_type"), serde_yaml::Value::String(t.label().to_string()));
    }
    if let Some(s) = &block.geographical_location {
        map.insert(key("geographical_location"), serde_yaml::Value::String(s.clone()));
    }
    if let Some(s) = &block.hardware_used {
        map.insert(key("hardware_used"), serde_yaml::Value::String(s.clone()));
    }
    if let Some(s) = &block.cloud_service {
        map.insert(key("cloud_service"), serde_yaml::Value::String(s.clone()));
    }
    if let Some(v) = block.training_time_s {
        map.insert(key("training_time"), serde_yaml::Value::Number(serde_yaml::Number::from(v)));
    }
    if let Some(s) = &block.optimization_techniques {
        map.insert(key("optimization_techniques"), serde_yaml::Value::String(s.clone()));
    }
    if let Some(label) = &block.energy_label {
        let mut entry = serde_yaml::Mapping::new();
        entry.insert(key("energy_label_source"), serde_yaml::Value::String(label.source.clone()));
        entry.insert(
            key("energy_label_classification"),
            serde_yaml::Value::String(label.classification.clone()),
        );
        map.insert(
            key("energy_label"),
            serde_yaml::Value::Sequence(vec![serde_yaml::Value::Mapping(entry)]),
        );
    }
    serde_yaml::Value::Mapping(map)
}
