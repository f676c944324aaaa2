//! Registry access: REST listing/card fetches and offline JSONL snapshots.
//!
//! Every downstream stage runs from a snapshot file, so a single `fetch`
//! against the live API is enough to make the whole pipeline reproducible
//! offline.

mod client;
mod snapshot;

pub use client::{CardFetch, ListFilter, RegistryClient, RegistryConfig, RetryPolicy};
pub use snapshot::{read_snapshot, write_snapshot};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One registry API record: identity, tags, popularity, and the raw card.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawModelEntry {
    /// `namespace/name` identifier, unique within a snapshot.
    pub model_id: String,
    #[serde(default)]
    pub tags: Vec<String>,
    #[serde(default)]
    pub downloads: u64,
    /// Creation timestamp as reported by the API (RFC 3339 expected);
    /// parsing is deferred to harmonization so malformed values survive the
    /// snapshot round-trip.
    #[serde(default)]
    pub created_at: Option<String>,
    #[serde(default)]
    pub library_name: Option<String>,
    /// Full model-card file content, when fetched.
    #[serde(default)]
    pub card_text: Option<String>,
    /// Front-matter block verbatim, when pre-extracted.
    #[serde(default)]
    pub card_metadata_raw: Option<String>,
}

impl RawModelEntry {
    pub fn new(model_id: impl Into<String>) -> Self {
        RawModelEntry {
            model_id: model_id.into(),
            tags: Vec::new(),
            downloads: 0,
            created_at: None,
            library_name: None,
            card_text: None,
            card_metadata_raw: None,
        }
    }
}

/// First line of a snapshot file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub fetched_at: chrono::DateTime<chrono::Utc>,
    /// API base URL or file path the records came from.
    pub source: String,
    pub record_count: u64,
    pub tool_version: String,
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("transport failure after {attempts} attempt(s){}: {message}", status_suffix(*.status))]
    Transport { attempts: u32, status: Option<u16>, message: String },
    #[error("model not found: {0}")]
    NotFound(String),
    #[error("malformed API payload at record index {index}: {message}")]
    PayloadParse { index: usize, message: String },
    #[error("snapshot parse error at line {line}: {message}")]
    SnapshotParse { line: usize, message: String },
    #[error("snapshot integrity error: header record_count {expected} but found {actual} records")]
    Integrity { expected: u64, actual: u64 },
    #[error("duplicate model_id in snapshot input: {0}")]
    DuplicateModelId(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid base URL: {0}")]
    BadUrl(String),
}

fn status_suffix(status: Option<u16>) -> String {
    match status {
        Some(code) => format!(" (last HTTP status {code})"),
        None => String::new(),
    }
}
