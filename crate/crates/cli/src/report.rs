use std::path::{Path, PathBuf};

use spp_core::evaluation::{ReportBundle, ReportOptions};
use spp_core::tasks::InstanceResult;

use crate::{write_atomic, CliError};

/// Reads `results.jsonl` files, failing on the first malformed line.
pub fn read_results(paths: &[PathBuf]) -> Result<Vec<InstanceResult>, CliError> {
    let mut results = Vec::new();
    for path in paths {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let r: InstanceResult = serde_json::from_str(line)
                .map_err(|e| CliError::Io(format!("{}:{}: {e}", path.display(), idx + 1)))?;
            results.push(r);
        }
    }
    Ok(results)
}

/// Writes every report artifact for the given result files into `out_dir`.
pub fn cmd_report(paths: &[PathBuf], out_dir: &Path, opts: ReportOptions) -> Result<ReportBundle, CliError> {
    if paths.is_empty() {
        return Err(CliError::Config("no results files given".into()));
    }
    let results = read_results(paths)?;
    let bundle = ReportBundle::from_results(&results, opts)?;
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    for (name, contents) in bundle.files() {
        write_atomic(&out_dir.join(name), contents)?;
    }
    Ok(bundle)
}
