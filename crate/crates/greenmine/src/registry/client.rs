//! Blocking REST client for the registry API.
//!
//! Defaults target the public hub API shape: a paginated list endpoint
//! (`Link: <...>; rel="next"` headers) and a raw card file endpoint. All
//! paths are configurable so the client also runs against local fixture
//! servers.

use std::collections::BTreeMap;
use std::sync::Mutex;
use std::time::Duration;

use super::{RawModelEntry, RegistryError};

/// Environment variable holding an optional bearer token.
pub const API_TOKEN_ENV: &str = "GREENMINE_API_TOKEN";

/// Retry behavior for transient transport failures (connect errors, 429,
/// 5xx). `Retry-After` headers are honored when present.
#[derive(Debug, Clone)]
pub struct RetryPolicy {
    pub attempts: u32,
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { attempts: 3, base_delay: Duration::from_secs(1) }
    }
}

impl RetryPolicy {
    fn delay_for(&self, attempt: u32, retry_after: Option<Duration>) -> Duration {
        retry_after.unwrap_or_else(|| self.base_delay * 2u32.saturating_pow(attempt - 1))
    }
}

#[derive(Debug, Clone)]
pub struct RegistryConfig {
    /// Base URL, e.g. `https://huggingface.co`.
    pub api_base: String,
    /// Listing endpoint path.
    pub list_path: String,
    /// Model info endpoint; `{model_id}` is substituted.
    pub model_info_path: String,
    /// Raw card file endpoint; `{model_id}` is substituted.
    pub card_path: String,
    /// Page size requested from the list endpoint.
    pub page_size: usize,
    /// Maximum in-flight card fetches.
    pub concurrency: usize,
    pub retry: RetryPolicy,
    /// Bearer token; anonymous access is fine for public listings.
    pub token: Option<String>,
}

impl RegistryConfig {
    pub fn new(api_base: impl Into<String>) -> Self {
        RegistryConfig {
            api_base: api_base.into(),
            list_path: "/api/models".into(),
            model_info_path: "/api/models/{model_id}".into(),
            card_path: "/{model_id}/raw/main/README.md".into(),
            page_size: 1000,
            concurrency: 8,
            retry: RetryPolicy::default(),
            token: std::env::var(API_TOKEN_ENV).ok(),
        }
    }
}

/// Conjunction of tag equalities applied to the listing.
#[derive(Debug, Clone, Default)]
pub struct ListFilter {
    pub tags: Vec<String>,
}

impl ListFilter {
    pub fn matches(&self, entry: &RawModelEntry) -> bool {
        self.tags.iter().all(|t| entry.tags.iter().any(|have| have == t))
    }
}

/// Result of a card fetch that distinguishes "model exists, card absent"
/// from "model absent" (the latter is an error).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CardFetch {
    Card(String),
    Absent,
}

pub struct RegistryClient {
    config: RegistryConfig,
    http: reqwest::blocking::Client,
}

impl RegistryClient {
    pub fn new(config: RegistryConfig) -> Result<Self, RegistryError> {
        if !config.api_base.starts_with("http://") && !config.api_base.starts_with("https://") {
            return Err(RegistryError::BadUrl(config.api_base));
        }
        let http = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(60))
            .connect_timeout(Duration::from_secs(10))
            .build()
            .map_err(|e| RegistryError::Transport { attempts: 0, status: None, message: e.to_string() })?;
        Ok(RegistryClient { config, http })
    }

    pub fn config(&self) -> &RegistryConfig {
        &self.config
    }

    fn url(&self, path: &str) -> String {
        let base = self.config.api_base.trim_end_matches('/');
        format!("{base}{path}")
    }

    fn get_with_retry(&self, url: &str) -> Result<reqwest::blocking::Response, RegistryError> {
        let policy = &self.config.retry;
        let mut last_status: Option<u16> = None;
        let mut last_message = String::new();
        for attempt in 1..=policy.attempts {
            let mut request = self.http.get(url);
            if let Some(token) = &self.config.token {
                request = request.bearer_auth(token);
            }
            match request.send() {
                Ok(response) => {
                    let status = response.status();
                    if status.as_u16() == 429 || status.is_server_error() {
                        last_status = Some(status.as_u16());
                        last_message = format!("GET {url} returned {status}");
                        if attempt < policy.attempts {
                            let retry_after = response
                                .headers()
                                .get(reqwest::header::RETRY_AFTER)
                                .and_then(|v| v.to_str().ok())
                                .and_then(|v| v.parse::<u64>().ok())
                                .map(Duration::from_secs);
                            std::thread::sleep(policy.delay_for(attempt, retry_after));
                            continue;
                        }
                    } else {
                        return Ok(response);
                    }
                }
                Err(e) => {
                    last_status = e.status().map(|s| s.as_u16());
                    last_message = e.to_string();
                    if attempt < policy.attempts {
                        std::thread::sleep(policy.delay_for(attempt, None));
                        continue;
                    }
                }
            }
        }
        Err(RegistryError::Transport {
            attempts: policy.attempts,
            status: last_status,
            message: last_message,
        })
    }

    /// Lists models matching `filter`, following pagination links up to
    /// `page_limit` pages (`None` = all). Results are deduplicated by
    /// `model_id` and returned in model_id order.
    pub fn list_models(
        &self,
        filter: &ListFilter,
        page_limit: Option<usize>,
    ) -> Result<Vec<RawModelEntry>, RegistryError> {
        if page_limit == Some(0) {
            return Ok(Vec::new());
        }
        let mut url = format!("{}?limit={}", self.url(&self.config.list_path), self.config.page_size);
        if !filter.tags.is_empty() {
            url.push_str(&format!("&filter={}", filter.tags.join(",")));
        }

        let mut by_id: BTreeMap<String, RawModelEntry> = BTreeMap::new();
        let mut pages = 0usize;
        let mut record_index = 0usize;
        loop {
            let response = self.get_with_retry(&url)?;
            let status = response.status();
            if !status.is_success() {
                return Err(RegistryError::Transport {
                    attempts: self.config.retry.attempts,
                    status: Some(status.as_u16()),
                    message: format!("GET {url} returned {status}"),
                });
            }
            let next = next_link(&response);
            let payload: serde_json::Value =
                response.json().map_err(|e| RegistryError::PayloadParse {
                    index: record_index,
                    message: e.to_string(),
                })?;
            let items = payload.as_array().ok_or_else(|| RegistryError::PayloadParse {
                index: record_index,
                message: "expected a JSON array of models".into(),
            })?;
            let page_len = items.len();
            for item in items {
                let entry = parse_entry(item, record_index)?;
                // server-side filter is advisory; verify client-side
                if filter.matches(&entry) {
                    by_id.entry(entry.model_id.clone()).or_insert(entry);
                }
                record_index += 1;
            }

            pages += 1;
            if let Some(limit) = page_limit {
                if pages >= limit {
                    break;
                }
            }
            match next {
                Some(next_url) if page_len > 0 => url = next_url,
                _ => break,
            }
        }
        Ok(by_id.into_values().collect())
    }

    /// Fetches the raw model card. A missing card on an existing model is
    /// the `Absent` marker; a missing model is an error.
    pub fn fetch_card(&self, model_id: &str) -> Result<CardFetch, RegistryError> {
        assert!(!model_id.is_empty(), "model_id must be non-empty");
        let card_url = self.url(&self.config.card_path.replace("{model_id}", model_id));
        let response = self.get_with_retry(&card_url)?;
        let status = response.status();
        if status.is_success() {
            let text = response.text().map_err(|e| RegistryError::Transport {
                attempts: 1,
                status: None,
                message: e.to_string(),
            })?;
            return Ok(CardFetch::Card(text));
        }
        if status.as_u16() == 404 {
            // disambiguate: does the model itself exist?
            let info_url = self.url(&self.config.model_info_path.replace("{model_id}", model_id));
            let info = self.get_with_retry(&info_url)?;
            if info.status().is_success() {
                return Ok(CardFetch::Absent);
            }
            return Err(RegistryError::NotFound(model_id.to_string()));
        }
        Err(RegistryError::Transport {
            attempts: self.config.retry.attempts,
            status: Some(status.as_u16()),
            message: format!("GET {card_url} returned {status}"),
        })
    }

    /// Fetches cards for all entries with bounded concurrency and attaches
    /// them to the entries. Results are merged deterministically: the input
    /// order is preserved regardless of fetch completion order.
    pub fn attach_cards(
        &self,
        entries: &mut [RawModelEntry],
    ) -> Vec<(String, RegistryError)> {
        let worker_count = self.config.concurrency.max(1).min(entries.len().max(1));
        let next = std::sync::atomic::AtomicUsize::new(0);
        let results: Mutex<Vec<(usize, Result<CardFetch, RegistryError>)>> =
            Mutex::new(Vec::with_capacity(entries.len()));
        let ids: Vec<String> = entries.iter().map(|e| e.model_id.clone()).collect();

        std::thread::scope(|scope| {
            for _ in 0..worker_count {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                    if i >= ids.len() {
                        break;
                    }
                    let outcome = self.fetch_card(&ids[i]);
                    results.lock().unwrap().push((i, outcome));
                });
            }
        });

        let mut failures = Vec::new();
        let mut results = results.into_inner().unwrap();
        results.sort_by_key(|(i, _)| *i);
        for (i, outcome) in results {
            match outcome {
                Ok(CardFetch::Card(text)) => entries[i].card_text = Some(text),
                Ok(CardFetch::Absent) => entries[i].card_text = None,
                Err(e) => failures.push((ids[i].clone(), e)),
            }
        }
        failures.sort_by(|a, b| a.0.cmp(&b.0));
        failures
    }
}

// Extracts the rel="next" target from a Link header, if any.
fn next_link(response: &reqwest::blocking::Response) -> Option<String> {
    let header = response.headers().get(reqwest::header::LINK)?.to_str().ok()?;
    for part in header.split(',') {
        let part = part.trim();
        if !part.contains("rel=\"next\"") {
            continue;
        }
        let start = part.find('<')? + 1;
        let end = part.find('>')?;
        return Some(part[start..end].to_string());
    }
    None
}

fn parse_entry(item: &serde_json::Value, index: usize) -> Result<RawModelEntry, RegistryError> {
    let obj = item.as_object().ok_or_else(|| RegistryError::PayloadParse {
        index,
        message: "model record is not a JSON object".into(),
    })?;
    let model_id = obj
        .get("id")
        .or_else(|| obj.get("modelId"))
        .and_then(|v| v.as_str())
        .filter(|s| !s.is_empty())
        .ok_or_else(|| RegistryError::PayloadParse {
            index,
            message: "missing or empty model id".into(),
        })?;
    let tags = match obj.get("tags") {
        None | Some(serde_json::Value::Null) => Vec::new(),
        Some(serde_json::Value::Array(values)) => {
            let mut tags = Vec::with_capacity(values.len());
            for v in values {
                match v.as_str() {
                    Some(s) => tags.push(s.to_string()),
                    None => {
                        return Err(RegistryError::PayloadParse {
                            index,
                            message: "non-string tag".into(),
                        })
                    }
                }
            }
            tags
        }
        Some(_) => {
            return Err(RegistryError::PayloadParse { index, message: "tags is not an array".into() })
        }
    };
    let downloads = match obj.get("downloads") {
        None | Some(serde_json::Value::Null) => 0,
        Some(v) => v.as_u64().ok_or_else(|| RegistryError::PayloadParse {
            index,
            message: "downloads is not a non-negative integer".into(),
        })?,
    };
    let created_at = obj
        .get("createdAt")
        .or_else(|| obj.get("created_at"))
        .and_then(|v| v.as_str())
        .map(str::to_string);
    let library_name = obj
        .get("library_name")
        .or_else(|| obj.get("libraryName"))
        .and_then(|v| v.as_str())
        .map(str::to_string);
    Ok(RawModelEntry {
        model_id: model_id.to_string(),
        tags,
        downloads,
        created_at,
        library_name,
        card_text: None,
        card_metadata_raw: None,
    })
}
