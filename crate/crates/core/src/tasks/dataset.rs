use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::model::{validate_instance, TaskInstance, TaskKind};

/// One problem found while reading a dataset file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetIssue {
    /// 1-based line number.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for DatasetIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{} invalid line(s): {}", .0.len(), join_issues(.0))]
    Invalid(Vec<DatasetIssue>),
    #[error("expected {expected} instances, found {found}")]
    CountMismatch { expected: usize, found: usize },
}

fn join_issues(issues: &[DatasetIssue]) -> String {
    issues.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; ")
}

/// Everything read from a dataset file, including lines that failed.
#[derive(Debug, Default)]
pub struct DatasetScan {
    pub instances: Vec<TaskInstance>,
    pub issues: Vec<DatasetIssue>,
}

/// Reads a JSONL dataset and reports every malformed line, invariant violation and duplicate id.
pub fn scan_dataset(path: &Path, kind: TaskKind) -> Result<DatasetScan, DatasetError> {
    let body = fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut scan = DatasetScan::default();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (idx, line) in body.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let instance: TaskInstance = match serde_json::from_str(line) {
            Ok(inst) => inst,
            Err(e) => {
                scan.issues.push(DatasetIssue { line: line_no, message: format!("schema error: {e}") });
                continue;
            }
        };
        if instance.kind != kind {
            scan.issues.push(DatasetIssue {
                line: line_no,
                message: format!("kind {} does not match expected {}", instance.kind, kind),
            });
            continue;
        }
        for violation in validate_instance(&instance) {
            scan.issues.push(DatasetIssue { line: line_no, message: violation.to_string() });
        }
        if let Some(first) = seen.get(&instance.id) {
            scan.issues.push(DatasetIssue {
                line: line_no,
                message: format!("duplicate id {:?} (first seen on line {first})", instance.id),
            });
        } else {
            seen.insert(instance.id.clone(), line_no);
        }
        scan.instances.push(instance);
    }
    Ok(scan)
}

/// Loads a dataset, failing on any issue or when the count differs from `expected_count`.
pub fn load_dataset(
    path: &Path,
    kind: TaskKind,
    expected_count: Option<usize>,
) -> Result<Vec<TaskInstance>, DatasetError> {
    let scan = scan_dataset(path, kind)?;
    if !scan.issues.is_empty() {
        return Err(DatasetError::Invalid(scan.issues));
    }
    if let Some(expected) = expected_count {
        if scan.instances.len() != expected {
            return Err(DatasetError::CountMismatch { expected, found: scan.instances.len() });
        }
    }
    Ok(scan.instances)
}
