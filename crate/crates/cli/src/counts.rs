//! Marker count files: tab-separated, one marker per row, `#` comments,
//! mandatory header.

use crate::error::{CliError, CliResult};
use allele_assoc::AlleleCounts;
use std::collections::HashMap;
use std::path::Path;

pub const HEADER: [&str; 5] = ["marker_id", "case_m1", "case_m2", "ctrl_m1", "ctrl_m2"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkerCounts {
    pub marker_id: String,
    pub counts: AlleleCounts,
}

pub fn parse_counts_file(path: &Path) -> CliResult<Vec<MarkerCounts>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_counts(&text)
}

pub fn parse_counts(text: &str) -> CliResult<Vec<MarkerCounts>> {
    let mut rows = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));

    let Some((line, header)) = rows.next() else {
        return Err(CliError::Validation("counts file is empty".into()));
    };
    let fields: Vec<&str> = header.split('\t').map(str::trim).collect();
    if fields != HEADER {
        return Err(CliError::Format {
            line,
            message: format!("expected header `{}`, found `{header}`", HEADER.join("\\t")),
        });
    }

    let mut markers = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (line, row) in rows {
        let fields: Vec<&str> = row.split('\t').map(str::trim).collect();
        if fields.len() != HEADER.len() {
            return Err(CliError::Format {
                line,
                message: format!(
                    "expected {} tab-separated fields, found {}",
                    HEADER.len(),
                    fields.len()
                ),
            });
        }
        let id = fields[0];
        if id.is_empty() {
            return Err(CliError::Format {
                line,
                message: "empty marker_id".into(),
            });
        }
        let mut n = [0u64; 4];
        for (k, (slot, raw)) in n.iter_mut().zip(&fields[1..]).enumerate() {
            *slot = parse_count(raw).map_err(|message| CliError::Format {
                line,
                message: format!("{}: {message}", HEADER[k + 1]),
            })?;
        }
        let counts = AlleleCounts::new(n[0], n[1], n[2], n[3])
            .map_err(|e| CliError::Validation(format!("line {line}, marker {id}: {e}")))?;
        if let Some(first) = seen.insert(id.to_string(), line) {
            return Err(CliError::Validation(format!(
                "duplicate marker_id {id} on lines {first} and {line}"
            )));
        }
        markers.push(MarkerCounts {
            marker_id: id.to_string(),
            counts,
        });
    }
    if markers.is_empty() {
        return Err(CliError::Validation(
            "counts file has a header but no markers".into(),
        ));
    }
    Ok(markers)
}

fn parse_count(raw: &str) -> Result<u64, String> {
    if raw.starts_with('-') {
        return Err(format!("negative count `{raw}`"));
    }
    raw.parse()
        .map_err(|_| format!("not a non-negative integer: `{raw}`"))
}
