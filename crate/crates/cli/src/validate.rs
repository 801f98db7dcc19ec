use std::path::Path;

use spp_core::model::TaskKind;
use spp_core::tasks::{scan_dataset, DatasetIssue};

use crate::CliError;

/// Every schema error, invariant violation and duplicate id in a dataset file.
pub fn cmd_validate(path: &Path, kind: TaskKind) -> Result<Vec<DatasetIssue>, CliError> {
    Ok(scan_dataset(path, kind)?.issues)
}
