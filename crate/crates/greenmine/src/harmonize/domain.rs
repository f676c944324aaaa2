//! Tag-to-domain mapping with a fixed priority order for multi-domain tags.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::HarmonizeError;

/// ML application domain of a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, Hash)]
pub enum Domain {
    Multimodal,
    ReinforcementLearning,
    Audio,
    ComputerVision,
    #[serde(rename = "NLP")]
    Nlp,
    NoTag,
    Other,
}

impl Domain {
    /// Priority order used when tags map to several domains: the more
    /// specific domains win over the ubiquitous NLP task tags.
    pub const PRIORITY: [Domain; 5] = [
        Domain::Multimodal,
        Domain::ReinforcementLearning,
        Domain::Audio,
        Domain::ComputerVision,
        Domain::Nlp,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Domain::Multimodal => "Multimodal",
            Domain::ReinforcementLearning => "ReinforcementLearning",
            Domain::Audio => "Audio",
            Domain::ComputerVision => "ComputerVision",
            Domain::Nlp => "NLP",
            Domain::NoTag => "NoTag",
            Domain::Other => "Other",
        }
    }

    fn parse(text: &str) -> Option<Domain> {
        match text {
            "Multimodal" => Some(Domain::Multimodal),
            "ReinforcementLearning" => Some(Domain::ReinforcementLearning),
            "Audio" => Some(Domain::Audio),
            "ComputerVision" => Some(Domain::ComputerVision),
            "NLP" => Some(Domain::Nlp),
            _ => None,
        }
    }
}

impl std::fmt::Display for Domain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

const DEFAULT_TABLE: &str = include_str!("../../config/domain_map.tsv");

/// Loaded tag-to-domain dictionary.
#[derive(Debug, Clone)]
pub struct DomainTable {
    by_tag: BTreeMap<String, Domain>,
}

impl Default for DomainTable {
    fn default() -> Self {
        DomainTable::parse(DEFAULT_TABLE).expect("embedded domain table is valid")
    }
}

impl DomainTable {
    /// Parses `tag<TAB>domain` lines; `#` comments and blanks are skipped.
    pub fn parse(text: &str) -> Result<Self, HarmonizeError> {
        let mut by_tag = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (tag, domain) = line.split_once('\t').ok_or_else(|| HarmonizeError::Config {
                path: "domain table".into(),
                message: format!("line {}: expected `tag<TAB>domain`", idx + 1),
            })?;
            let domain = Domain::parse(domain.trim()).ok_or_else(|| HarmonizeError::Config {
                path: "domain table".into(),
                message: format!("line {}: unknown domain {:?}", idx + 1, domain.trim()),
            })?;
            by_tag.insert(tag.trim().to_lowercase(), domain);
        }
        Ok(DomainTable { by_tag })
    }

    pub fn load(path: &std::path::Path) -> Result<Self, HarmonizeError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarmonizeError::Config {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        DomainTable::parse(&text)
    }

    pub fn domain_of(&self, tag: &str) -> Option<Domain> {
        self.by_tag.get(&tag.to_lowercase()).copied()
    }
}

/// Maps a model's tags to its domain. The empty tag list is `NoTag`; tags
/// present but none mapped is `Other`. With multiple candidate domains the
/// fixed priority order decides, so the result is independent of tag order.
pub fn map_domain(tags: &[String], table: &DomainTable) -> Domain {
    if tags.is_empty() {
        return Domain::NoTag;
    }
    let mut candidates: Vec<Domain> = tags.iter().filter_map(|t| table.domain_of(t)).collect();
    candidates.sort_unstable();
    candidates.dedup();
    for domain in Domain::PRIORITY {
        if candidates.contains(&domain) {
            return domain;
        }
    }
    Domain::Other
}
