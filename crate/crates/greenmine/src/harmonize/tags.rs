//! Tag filtering: language tags, auxiliary tags, and the low-frequency
//! threshold.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::HarmonizeError;

/// Tags appearing on fewer models than this are dropped.
pub const DEFAULT_TAG_THRESHOLD: u64 = 100;

const LANGUAGE_TAGS: &str = include_str!("../../config/language_tags.txt");
const AUXILIARY_TAGS: &str = include_str!("../../config/auxiliary_tags.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    Language,
    Auxiliary,
    BelowThreshold,
}

/// Per-tag outcome of the filtering pass.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TagStats {
    pub tag: String,
    pub model_count: u64,
    pub kept: bool,
    pub drop_reason: Option<DropReason>,
}

/// The shipped (or user-overridden) language and auxiliary drop-lists.
#[derive(Debug, Clone)]
pub struct TagLists {
    language: BTreeSet<String>,
    auxiliary: BTreeSet<String>,
}

impl Default for TagLists {
    fn default() -> Self {
        TagLists {
            language: parse_list(LANGUAGE_TAGS),
            auxiliary: parse_list(AUXILIARY_TAGS),
        }
    }
}

fn parse_list(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

impl TagLists {
    pub fn load(
        language_path: Option<&std::path::Path>,
        auxiliary_path: Option<&std::path::Path>,
    ) -> Result<Self, HarmonizeError> {
        let mut lists = TagLists::default();
        if let Some(path) = language_path {
            lists.language = parse_list(&read(path)?);
        }
        if let Some(path) = auxiliary_path {
            lists.auxiliary = parse_list(&read(path)?);
        }
        Ok(lists)
    }

    pub fn is_language(&self, tag: &str) -> bool {
        self.language.contains(&tag.to_lowercase())
    }

    /// Auxiliary when the tag equals a list entry or uses its `entry:` prefix
    /// form (`doi:10.57967/...`, `license:mit`).
    pub fn is_auxiliary(&self, tag: &str) -> bool {
        let lower = tag.to_lowercase();
        if self.auxiliary.contains(&lower) {
            return true;
        }
        match lower.split_once(':') {
            Some((prefix, _)) => self.auxiliary.contains(prefix),
            None => false,
        }
    }
}

fn read(path: &std::path::Path) -> Result<String, HarmonizeError> {
    std::fs::read_to_string(path).map_err(|e| HarmonizeError::Config {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Classifies every tag as kept or dropped (language, auxiliary, or below
/// the model-count threshold). Output is sorted by tag name.
pub fn filter_tags(
    tag_counts: &BTreeMap<String, u64>,
    threshold: u64,
    lists: &TagLists,
) -> Vec<TagStats> {
    tag_counts
        .iter()
        .map(|(tag, &model_count)| {
            let drop_reason = if lists.is_language(tag) {
                Some(DropReason::Language)
            } else if lists.is_auxiliary(tag) {
                Some(DropReason::Auxiliary)
            } else if model_count < threshold {
                Some(DropReason::BelowThreshold)
            } else {
                None
            };
            TagStats { tag: tag.clone(), model_count, kept: drop_reason.is_none(), drop_reason }
        })
        .collect()
}
