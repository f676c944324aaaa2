//! Reporting-practice tiers, from no information at all up to certified
//! energy efficiency.

use serde::{Deserialize, Serialize};

use crate::harmonize::ModelRecord;

/// Context fields that count towards the reporting tiers, in the order they
/// are reported.
pub const CONTEXT_FIELDS: [&str; 4] =
    ["hardware_used", "geographical_location", "dataset_size_bytes", "training_type"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, Hash)]
pub enum TierLevel {
    UnknownEmissions,
    ContextReporting,
    BasicEmissionReporting,
    EnergyAwareness,
    CertifiedEnergyEfficiency,
}

impl TierLevel {
    pub const ALL: [TierLevel; 5] = [
        TierLevel::UnknownEmissions,
        TierLevel::ContextReporting,
        TierLevel::BasicEmissionReporting,
        TierLevel::EnergyAwareness,
        TierLevel::CertifiedEnergyEfficiency,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TierLevel::UnknownEmissions => "UnknownEmissions",
            TierLevel::ContextReporting => "ContextReporting",
            TierLevel::BasicEmissionReporting => "BasicEmissionReporting",
            TierLevel::EnergyAwareness => "EnergyAwareness",
            TierLevel::CertifiedEnergyEfficiency => "CertifiedEnergyEfficiency",
        }
    }
}

impl std::fmt::Display for TierLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Tier assignment plus the context fields that drove it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportingTier {
    pub tier: TierLevel,
    pub context_fields_present: Vec<String>,
}

/// Classifies a harmonized record by reporting practice. Total over all
/// inputs:
///
/// - no emissions, no context: UnknownEmissions
/// - context only: ContextReporting
/// - emissions only: BasicEmissionReporting
/// - emissions + context: EnergyAwareness
/// - EnergyAwareness + certification: CertifiedEnergyEfficiency
pub fn classify_reporting(record: &ModelRecord, has_certification: bool) -> ReportingTier {
    let mut context_fields_present = Vec::new();
    if record.hardware_used.is_some() {
        context_fields_present.push(CONTEXT_FIELDS[0].to_string());
    }
    if record.geographical_location.is_some() {
        context_fields_present.push(CONTEXT_FIELDS[1].to_string());
    }
    if record.dataset_size_bytes.is_some() {
        context_fields_present.push(CONTEXT_FIELDS[2].to_string());
    }
    if record.training_type.is_some() {
        context_fields_present.push(CONTEXT_FIELDS[3].to_string());
    }

    let has_emissions = record.co2_grams.is_some();
    let has_context = !context_fields_present.is_empty();
    let tier = match (has_emissions, has_context) {
        (false, false) => TierLevel::UnknownEmissions,
        (false, true) => TierLevel::ContextReporting,
        (true, false) => TierLevel::BasicEmissionReporting,
        (true, true) if has_certification => TierLevel::CertifiedEnergyEfficiency,
        (true, true) => TierLevel::EnergyAwareness,
    };
    ReportingTier { tier, context_fields_present }
}
