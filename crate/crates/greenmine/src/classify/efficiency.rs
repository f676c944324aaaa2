//! Carbon-efficiency labels: indexed attributes against a reference model,
//! quartile ranks over the corpus, weight renormalization over present
//! attributes, and threshold mapping onto A-E.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::harmonize::ModelRecord;

use super::ClassifyError;

/// Floor applied to normalized metrics so the harmonic mean stays defined
/// when a metric is zero.
pub const PERFORMANCE_EPSILON: f64 = 1e-6;

/// The five indexed attributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, Hash)]
#[serde(rename_all = "snake_case")]
pub enum Attribute {
    Co2,
    SizeEfficiency,
    DatasetEfficiency,
    Downloads,
    Performance,
}

impl Attribute {
    pub const ALL: [Attribute; 5] = [
        Attribute::Co2,
        Attribute::SizeEfficiency,
        Attribute::DatasetEfficiency,
        Attribute::Downloads,
        Attribute::Performance,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Attribute::Co2 => "co2",
            Attribute::SizeEfficiency => "size_efficiency",
            Attribute::DatasetEfficiency => "dataset_efficiency",
            Attribute::Downloads => "downloads",
            Attribute::Performance => "performance",
        }
    }

    /// Whether high raw values are good (maximize) or bad (minimize).
    pub fn direction(&self) -> Direction {
        match self {
            Attribute::Co2 => Direction::Minimize,
            _ => Direction::Maximize,
        }
    }
}

impl std::fmt::Display for Attribute {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

/// Carbon-efficiency label, A (most efficient) to E (least).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, Hash)]
pub enum EfficiencyLabel {
    A,
    B,
    C,
    D,
    E,
}

impl EfficiencyLabel {
    pub const ALL: [EfficiencyLabel; 5] = [
        EfficiencyLabel::A,
        EfficiencyLabel::B,
        EfficiencyLabel::C,
        EfficiencyLabel::D,
        EfficiencyLabel::E,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            EfficiencyLabel::A => "A",
            EfficiencyLabel::B => "B",
            EfficiencyLabel::C => "C",
            EfficiencyLabel::D => "D",
            EfficiencyLabel::E => "E",
        }
    }
}

impl std::fmt::Display for EfficiencyLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Weights, reference values, and label thresholds for the efficiency
/// classification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EfficiencyConfig {
    pub weights: BTreeMap<Attribute, f64>,
    /// Explicit per-attribute reference values; merged over values derived
    /// from the reference model's own row.
    #[serde(default)]
    pub reference_values: BTreeMap<Attribute, f64>,
    /// Ascending cut points over the weighted mean in [1, 4]; below the
    /// first is A, at or above the last is E.
    pub label_thresholds: [f64; 4],
    pub reference_model_id: String,
}

impl Default for EfficiencyConfig {
    fn default() -> Self {
        let mut weights = BTreeMap::new();
        weights.insert(Attribute::Co2, 0.35);
        weights.insert(Attribute::SizeEfficiency, 0.1);
        weights.insert(Attribute::DatasetEfficiency, 0.1);
        weights.insert(Attribute::Downloads, 0.25);
        weights.insert(Attribute::Performance, 0.2);
        EfficiencyConfig {
            weights,
            reference_values: BTreeMap::new(),
            label_thresholds: [1.6, 2.2, 2.8, 3.4],
            reference_model_id: "distilgpt2".to_string(),
        }
    }
}

impl EfficiencyConfig {
    pub fn validate(&self) -> Result<(), ClassifyError> {
        let sum: f64 = self.weights.values().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(ClassifyError::BadWeightSum(sum));
        }
        for (attribute, weight) in &self.weights {
            if *weight <= 0.0 {
                return Err(ClassifyError::NonPositiveWeight(attribute.name().to_string()));
            }
        }
        let t = self.label_thresholds;
        let ascending = t.windows(2).all(|w| w[0] < w[1]);
        if !ascending || t[0] <= 1.0 || t[3] >= 4.0 {
            return Err(ClassifyError::BadThresholds(t));
        }
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ClassifyError> {
        let text = std::fs::read_to_string(path).map_err(|e| ClassifyError::Config {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let config: EfficiencyConfig = toml::from_str(&text).map_err(|e| ClassifyError::Config {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    fn label_for(&self, weighted_mean: f64) -> EfficiencyLabel {
        let t = self.label_thresholds;
        if weighted_mean < t[0] {
            EfficiencyLabel::A
        } else if weighted_mean < t[1] {
            EfficiencyLabel::B
        } else if weighted_mean < t[2] {
            EfficiencyLabel::C
        } else if weighted_mean < t[3] {
            EfficiencyLabel::D
        } else {
            EfficiencyLabel::E
        }
    }
}

/// Index of a value against a reference. Lower is better by construction:
/// `ref/val` for attributes to maximize, `val/ref` for attributes to
/// minimize.
pub fn compute_index(value: f64, reference: f64, direction: Direction) -> Result<f64, ClassifyError> {
    if !(value > 0.0 && value.is_finite() && reference > 0.0 && reference.is_finite()) {
        return Err(ClassifyError::NonPositiveIndexInput { value, reference });
    }
    Ok(match direction {
        Direction::Maximize => reference / value,
        Direction::Minimize => value / reference,
    })
}

/// Per-metric min/max over the corpus, for performance-score normalization.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MetricNormalizers {
    pub ranges: BTreeMap<String, (f64, f64)>,
}

impl MetricNormalizers {
    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a ModelRecord>) -> Self {
        let mut ranges: BTreeMap<String, (f64, f64)> = BTreeMap::new();
        for record in records {
            for (name, value) in &record.metrics {
                let entry = ranges.entry(name.clone()).or_insert((*value, *value));
                entry.0 = entry.0.min(*value);
                entry.1 = entry.1.max(*value);
            }
        }
        MetricNormalizers { ranges }
    }

    fn normalize(&self, name: &str, value: f64) -> f64 {
        let (min, max) = self.ranges.get(name).copied().unwrap_or((0.0, 1.0));
        if max <= min {
            // the whole corpus shares one value; every model is at the top
            return 1.0;
        }
        ((value - min) / (max - min)).clamp(PERFORMANCE_EPSILON, 1.0)
    }
}

/// Harmonic mean of min-max-normalized metrics, clamped to
/// [`PERFORMANCE_EPSILON`], 1]. `None` when no metric is present, so the
/// attribute is treated as missing.
pub fn performance_score(
    metrics: &BTreeMap<String, f64>,
    normalizers: &MetricNormalizers,
) -> Option<f64> {
    if metrics.is_empty() {
        return None;
    }
    let mut reciprocal_sum = 0.0;
    let mut count = 0usize;
    for (name, value) in metrics {
        let normalized = normalizers.normalize(name, *value);
        reciprocal_sum += 1.0 / normalized;
        count += 1;
    }
    Some(count as f64 / reciprocal_sum)
}

/// Quartile boundaries (25/50/75th percentiles, linear interpolation) over
/// one attribute's index column.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuartileTable {
    pub boundaries: [f64; 3],
    /// Set when fewer than 4 models carried the attribute; every rank is 2.
    pub degenerate: bool,
    pub n: usize,
}

impl QuartileTable {
    /// Rank 1 (best quartile) through 4; ties at a boundary take the lower
    /// rank.
    pub fn rank(&self, index: f64) -> u8 {
        if self.degenerate {
            return 2;
        }
        if index <= self.boundaries[0] {
            1
        } else if index <= self.boundaries[1] {
            2
        } else if index <= self.boundaries[2] {
            3
        } else {
            4
        }
    }
}

// Linear-interpolation percentile over a sorted slice.
fn percentile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    debug_assert!(n > 0);
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

/// Builds the quartile table for one attribute's index values.
pub fn assign_quartiles(indexes: &[f64]) -> QuartileTable {
    if indexes.len() < 4 {
        return QuartileTable { boundaries: [0.0; 3], degenerate: true, n: indexes.len() };
    }
    let mut sorted = indexes.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite indexes"));
    QuartileTable {
        boundaries: [
            percentile(&sorted, 0.25),
            percentile(&sorted, 0.50),
            percentile(&sorted, 0.75),
        ],
        degenerate: false,
        n: sorted.len(),
    }
}

/// Corpus-level context for labeling: normalizers, reference values, and
/// per-attribute quartile tables.
#[derive(Debug, Clone)]
pub struct CorpusContext {
    pub normalizers: MetricNormalizers,
    pub reference_values: BTreeMap<Attribute, f64>,
    pub quartiles: BTreeMap<Attribute, QuartileTable>,
    /// Attributes without a usable reference value, with the reason.
    pub excluded: BTreeMap<Attribute, String>,
}

// Raw attribute value of a record, before indexing. None = missing.
fn attribute_value(
    record: &ModelRecord,
    attribute: Attribute,
    normalizers: &MetricNormalizers,
) -> Option<f64> {
    let co2 = record.co2_grams.filter(|v| *v > 0.0);
    match attribute {
        Attribute::Co2 => co2,
        Attribute::SizeEfficiency => {
            let size = record.model_size_bytes.filter(|v| *v > 0.0)?;
            Some(size / co2?)
        }
        Attribute::DatasetEfficiency => {
            let size = record.dataset_size_bytes.filter(|v| *v > 0.0)?;
            Some(size / co2?)
        }
        Attribute::Downloads => (record.downloads > 0).then_some(record.downloads as f64),
        Attribute::Performance => performance_score(&record.metrics, normalizers),
    }
}

/// One corpus pass: derives reference values (explicit config wins over the
/// reference model's row), indexes every record, and fixes the quartile
/// tables.
pub fn build_corpus_context(
    records: &[ModelRecord],
    config: &EfficiencyConfig,
) -> Result<CorpusContext, ClassifyError> {
    config.validate()?;
    let normalizers = MetricNormalizers::from_records(records.iter());

    let reference_row = records.iter().find(|r| r.model_id == config.reference_model_id);
    if reference_row.is_none() && config.reference_values.is_empty() {
        return Err(ClassifyError::MissingReference(config.reference_model_id.clone()));
    }

    let mut reference_values = BTreeMap::new();
    let mut excluded = BTreeMap::new();
    for attribute in Attribute::ALL {
        let explicit = config.reference_values.get(&attribute).copied();
        let derived =
            reference_row.and_then(|row| attribute_value(row, attribute, &normalizers));
        match explicit.or(derived) {
            Some(v) if v > 0.0 && v.is_finite() => {
                reference_values.insert(attribute, v);
            }
            Some(v) => {
                excluded.insert(attribute, format!("reference value {v} not positive"));
            }
            None => {
                excluded.insert(
                    attribute,
                    format!("no reference value from {}", config.reference_model_id),
                );
            }
        }
    }

    let mut quartiles = BTreeMap::new();
    for (attribute, reference) in &reference_values {
        let mut indexes = Vec::new();
        for record in records {
            if let Some(value) = attribute_value(record, *attribute, &normalizers) {
                indexes.push(
                    compute_index(value, *reference, attribute.direction())
                        .expect("positive value and reference"),
                );
            }
        }
        quartiles.insert(*attribute, assign_quartiles(&indexes));
    }

    Ok(CorpusContext { normalizers, reference_values, quartiles, excluded })
}

/// Full efficiency result for one model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EfficiencyResult {
    pub model_id: String,
    pub indexes: BTreeMap<Attribute, f64>,
    pub quartile_ranks: BTreeMap<Attribute, u8>,
    pub present_attributes: Vec<Attribute>,
    pub weighted_mean: f64,
    pub label: EfficiencyLabel,
    /// Confidence annotations: `low_confidence` (CO2e alone),
    /// `degenerate_quartiles:<attr>`, `no_reference:<attr>`.
    pub flags: Vec<String>,
}

/// Labels one emission-reporting record against the corpus context.
/// Missing attributes are excluded and the weights renormalized over the
/// present ones.
pub fn efficiency_label(
    record: &ModelRecord,
    context: &CorpusContext,
    config: &EfficiencyConfig,
) -> Result<EfficiencyResult, ClassifyError> {
    if !record.co2_reported {
        return Err(ClassifyError::NotAReporter(record.model_id.clone()));
    }

    let mut indexes = BTreeMap::new();
    let mut quartile_ranks = BTreeMap::new();
    let mut present_attributes = Vec::new();
    let mut flags = Vec::new();

    for attribute in Attribute::ALL {
        let Some(value) = attribute_value(record, attribute, &context.normalizers) else {
            continue;
        };
        let Some(reference) = context.reference_values.get(&attribute) else {
            if context.excluded.contains_key(&attribute) {
                flags.push(format!("no_reference:{attribute}"));
            }
            continue;
        };
        let index = compute_index(value, *reference, attribute.direction())?;
        let table = &context.quartiles[&attribute];
        if table.degenerate && !flags.iter().any(|f| f == &format!("degenerate_quartiles:{attribute}")) {
            flags.push(format!("degenerate_quartiles:{attribute}"));
        }
        quartile_ranks.insert(attribute, table.rank(index));
        indexes.insert(attribute, index);
        present_attributes.push(attribute);
    }

    if present_attributes.is_empty() {
        return Err(ClassifyError::NoAttributes(record.model_id.clone()));
    }
    if present_attributes == [Attribute::Co2] {
        flags.push("low_confidence".to_string());
    }

    let weight_sum: f64 =
        present_attributes.iter().map(|a| config.weights.get(a).copied().unwrap_or(0.0)).sum();
    let weighted_mean: f64 = present_attributes
        .iter()
        .map(|a| {
            let weight = config.weights.get(a).copied().unwrap_or(0.0) / weight_sum;
            weight * f64::from(quartile_ranks[a])
        })
        .sum();

    Ok(EfficiencyResult {
        model_id: record.model_id.clone(),
        indexes,
        quartile_ranks,
        present_attributes,
        weighted_mean,
        label: config.label_for(weighted_mean),
        flags,
    })
}
