//! JSONL snapshot files: one header line, one record per line, sorted by
//! model_id so identical inputs always produce identical bytes.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{RawModelEntry, RegistryError, SnapshotHeader};

fn io_err(path: &Path, source: std::io::Error) -> RegistryError {
    RegistryError::Io { path: path.display().to_string(), source }
}

/// Writes entries to a JSONL snapshot. Returns the header written on line 1.
///
/// Entries are sorted by `model_id`; duplicate ids are rejected because a
/// snapshot is keyed by them.
pub fn write_snapshot(
    entries: &[RawModelEntry],
    path: &Path,
    source: &str,
    fetched_at: chrono::DateTime<chrono::Utc>,
) -> Result<SnapshotHeader, RegistryError> {
    let mut sorted: Vec<&RawModelEntry> = entries.iter().collect();
    sorted.sort_by(|a, b| a.model_id.cmp(&b.model_id));
    for pair in sorted.windows(2) {
        if pair[0].model_id == pair[1].model_id {
            return Err(RegistryError::DuplicateModelId(pair[0].model_id.clone()));
        }
    }

    let header = SnapshotHeader {
        fetched_at,
        source: source.to_string(),
        record_count: sorted.len() as u64,
        tool_version: crate::TOOL_VERSION.to_string(),
    };

    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut out = BufWriter::new(file);
    let header_line = serde_json::to_string(&header).expect("header serializes");
    writeln!(out, "{header_line}").map_err(|e| io_err(path, e))?;
    for entry in sorted {
        let line = serde_json::to_string(entry).expect("entry serializes");
        writeln!(out, "{line}").map_err(|e| io_err(path, e))?;
    }
    out.flush().map_err(|e| io_err(path, e))?;
    Ok(header)
}

/// Reads a snapshot, verifying the header record count.
pub fn read_snapshot(path: &Path) -> Result<(SnapshotHeader, Vec<RawModelEntry>), RegistryError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines().enumerate();

    let header: SnapshotHeader = match lines.next() {
        None => return Err(RegistryError::SnapshotParse { line: 1, message: "empty file".into() }),
        Some((_, Ok(text))) => serde_json::from_str(&text)
            .map_err(|e| RegistryError::SnapshotParse { line: 1, message: e.to_string() })?,
        Some((_, Err(e))) => return Err(io_err(path, e)),
    };

    let mut entries = Vec::new();
    for (idx, line) in lines {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: RawModelEntry = serde_json::from_str(&line)
            .map_err(|e| RegistryError::SnapshotParse { line: idx + 1, message: e.to_string() })?;
        entries.push(entry);
    }

    if header.record_count != entries.len() as u64 {
        return Err(RegistryError::Integrity {
            expected: header.record_count,
            actual: entries.len() as u64,
        });
    }
    Ok((header, entries))
}
