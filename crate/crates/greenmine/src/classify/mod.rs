//! The two classification systems: reporting-practice tiers and the A-E
//! carbon-efficiency label built from indexed attributes, quartile ranks,
//! and weighted means.

mod efficiency;
mod reporting;

pub use efficiency::{
    assign_quartiles, build_corpus_context, compute_index, efficiency_label, performance_score,
    Attribute, CorpusContext, Direction, EfficiencyConfig, EfficiencyLabel, EfficiencyResult,
    MetricNormalizers, QuartileTable, PERFORMANCE_EPSILON,
};
pub use reporting::{classify_reporting, ReportingTier, TierLevel, CONTEXT_FIELDS};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("index inputs must be positive: value={value}, reference={reference}")]
    NonPositiveIndexInput { value: f64, reference: f64 },
    #[error("weights must sum to 1 (got {0})")]
    BadWeightSum(f64),
    #[error("weight for {0} must be > 0")]
    NonPositiveWeight(String),
    #[error("label thresholds must be strictly ascending within (1, 4): {0:?}")]
    BadThresholds([f64; 4]),
    #[error(
        "reference model {0} not in corpus and no explicit reference_values configured"
    )]
    MissingReference(String),
    #[error("efficiency labels are only defined for emission-reporting records: {0}")]
    NotAReporter(String),
    #[error("record {0} has no indexable attribute")]
    NoAttributes(String),
    #[error("config file {path}: {message}")]
    Config { path: String, message: String },
}
