use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{average_and_max, early_termination_stats, format_1dp, persona_frequencies, relative_delta};
use crate::model::{InstanceScore, ScoreReport, Setting, Strategy, StrategyKind};
use crate::tasks::InstanceResult;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("no results to report")]
    Empty,
    #[error("no Standard results for {0}; deltas need a baseline")]
    MissingBaseline(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportOptions {
    /// Fail instead of omitting deltas when a task has no Standard results.
    pub require_baseline: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ReportKey {
    pub method: Strategy,
    pub task: String,
    pub setting: Setting,
}

/// Score reports for every (method, task, setting) present in a result set.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportSet {
    pub reports: BTreeMap<ReportKey, ScoreReport>,
}

impl ReportSet {
    /// Task columns in display order.
    pub fn tasks(&self) -> Vec<String> {
        let mut tasks: Vec<String> = self.reports.keys().map(|k| k.task.clone()).collect();
        tasks.sort_by_key(|t| task_order(t));
        tasks.dedup();
        tasks
    }

    pub fn methods(&self) -> Vec<Strategy> {
        let mut methods: Vec<Strategy> = self.reports.keys().map(|k| k.method).collect();
        methods.sort();
        methods.dedup();
        methods
    }

    /// Setting means (fractions) for one method and task, in `Setting::BOTH` order.
    fn setting_means(&self, method: Strategy, task: &str) -> Vec<(Setting, f64)> {
        Setting::BOTH
            .into_iter()
            .filter_map(|setting| {
                let key = ReportKey { method, task: task.to_string(), setting };
                self.reports.get(&key).and_then(|r| r.mean).map(|m| (setting, m))
            })
            .collect()
    }

    /// Average over the settings present, as a percentage.
    fn average_pct(&self, method: Strategy, task: &str) -> Option<f64> {
        let means = self.setting_means(method, task);
        match means.as_slice() {
            [] => None,
            [(_, only)] => Some(only * 100.0),
            [(_, a), (_, b), ..] => Some(average_and_max(a * 100.0, b * 100.0).0),
        }
    }
}

fn task_order(task: &str) -> (usize, String) {
    let rank = if task.starts_with("trivia_creative_writing") {
        0
    } else if task.starts_with("codenames") {
        1
    } else if task.starts_with("logic") {
        2
    } else {
        3
    };
    // n5 before n10
    let n: usize = task.rsplit("_n").next().and_then(|s| s.parse().ok()).unwrap_or(0);
    (rank, format!("{n:06}{task}"))
}

pub fn build_reports(results: &[InstanceResult]) -> ReportSet {
    let mut scored: BTreeMap<ReportKey, (Vec<InstanceScore>, usize)> = BTreeMap::new();
    for r in results {
        let key = ReportKey { method: r.method, task: r.task.clone(), setting: r.setting };
        let entry = scored.entry(key).or_default();
        match r.score {
            Some(score) if !r.skipped => entry.0.push(InstanceScore { instance_id: r.instance_id.clone(), score }),
            _ => entry.1 += 1,
        }
    }
    let reports = scored
        .into_iter()
        .map(|(key, (scores, skipped))| {
            let setting = key.setting;
            (key, ScoreReport::new(setting, scores, skipped))
        })
        .collect();
    ReportSet { reports }
}

fn csv_string(write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    write(&mut w).expect("writing to memory");
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 input")
}

/// One row per method × task × setting. Means are percentages at one decimal.
pub fn render_summary_csv(set: &ReportSet) -> String {
    csv_string(|w| {
        w.write_record(["method", "task", "setting", "n_scored", "n_skipped", "mean"])?;
        let mut keys: Vec<&ReportKey> = set.reports.keys().collect();
        keys.sort_by_key(|k| (k.method, task_order(&k.task), k.setting));
        for key in keys {
            let r = &set.reports[key];
            w.write_record([
                key.method.to_string(),
                key.task.clone(),
                key.setting.to_string(),
                r.n_scored.to_string(),
                r.n_skipped.to_string(),
                r.mean.map(|m| format_1dp(m * 100.0)).unwrap_or_default(),
            ])?;
        }
        Ok(())
    })
}

/// Averages across settings per task, with the change relative to Standard.
///
/// Deltas use the unrounded averages. Returns warnings for tasks lacking a Standard row.
pub fn render_table2(set: &ReportSet, opts: ReportOptions) -> Result<(String, Vec<String>), ReportError> {
    if set.reports.is_empty() {
        return Err(ReportError::Empty);
    }
    let tasks = set.tasks();
    let baseline = Strategy::new(StrategyKind::Standard);
    let mut warnings = Vec::new();
    let mut baselines = BTreeMap::new();
    for task in &tasks {
        match set.average_pct(baseline, task) {
            Some(avg) if avg != 0.0 => {
                baselines.insert(task.clone(), avg);
            }
            _ if opts.require_baseline => return Err(ReportError::MissingBaseline(task.clone())),
            _ => warnings.push(format!("no Standard results for {task}; deltas omitted")),
        }
    }

    let mut out = String::new();
    writeln!(out, "| Method | {} |", tasks.join(" | ")).unwrap();
    writeln!(out, "|---|{}", "---|".repeat(tasks.len())).unwrap();
    for method in set.methods() {
        let cells: Vec<String> = tasks
            .iter()
            .map(|task| match set.average_pct(method, task) {
                None => "–".to_string(),
                Some(avg) => match baselines.get(task) {
                    Some(base) if method != baseline => {
                        let delta = relative_delta(avg, *base).expect("nonzero baseline");
                        let rounded = format_1dp(delta);
                        let sign = if rounded.starts_with('-') { "" } else { "+" };
                        format!("{} ({sign}{rounded}%)", format_1dp(avg))
                    }
                    _ => format_1dp(avg),
                },
            })
            .collect();
        writeln!(out, "| {} | {} |", method.display_name(), cells.join(" | ")).unwrap();
    }
    Ok((out, warnings))
}

/// One table per task: each setting, their average and their max.
pub fn render_setting_tables(set: &ReportSet) -> String {
    let mut out = String::new();
    for task in set.tasks() {
        writeln!(out, "## {task}\n").unwrap();
        writeln!(out, "| Method | w/ system message | w/o system message | average | max |").unwrap();
        writeln!(out, "|---|---|---|---|---|").unwrap();
        for method in set.methods() {
            let means = set.setting_means(method, &task);
            if means.is_empty() {
                continue;
            }
            let cell = |s: Setting| {
                means.iter().find(|(x, _)| *x == s).map(|(_, m)| format_1dp(m * 100.0)).unwrap_or_else(|| "–".into())
            };
            let (avg, max) = match means.as_slice() {
                [(_, a), (_, b)] => {
                    let (avg, max) = average_and_max(a * 100.0, b * 100.0);
                    (format_1dp(avg), format_1dp(max))
                }
                _ => ("–".into(), "–".into()),
            };
            writeln!(
                out,
                "| {} | {} | {} | {avg} | {max} |",
                method.display_name(),
                cell(Setting::WithSystemMessage),
                cell(Setting::WithoutSystemMessage)
            )
            .unwrap();
        }
        out.push('\n');
    }
    out
}

/// Persona frequency per (method, task, setting) over SPP-family transcripts.
pub fn render_personas_csv(results: &[InstanceResult]) -> String {
    type Group = (Strategy, (usize, String), String, Setting);
    let mut groups: BTreeMap<Group, Vec<&crate::model::ParsedTranscript>> = BTreeMap::new();
    for r in results.iter().filter(|r| r.method.kind.is_spp_family()) {
        let entry = groups.entry((r.method, task_order(&r.task), r.task.clone(), r.setting)).or_default();
        entry.extend(r.roles.iter().filter_map(|role| role.outcome.parsed.as_ref()));
    }
    csv_string(|w| {
        w.write_record(["method", "task", "setting", "persona", "count", "total_transcripts"])?;
        for ((method, _, task, setting), transcripts) in groups {
            let freq = persona_frequencies(transcripts);
            for (persona, count) in freq.sorted() {
                w.write_record([
                    method.to_string(),
                    task.clone(),
                    setting.to_string(),
                    persona.to_string(),
                    count.to_string(),
                    freq.total_transcripts.to_string(),
                ])?;
            }
        }
        Ok(())
    })
}

pub fn render_early_termination_csv(results: &[InstanceResult]) -> String {
    let mut rows = early_termination_stats(results);
    rows.sort_by_key(|r| (r.method, task_order(&r.task), r.setting));
    csv_string(|w| {
        w.write_record(["method", "task", "setting", "terminated", "total"])?;
        for row in rows {
            w.write_record([
                row.method.to_string(),
                row.task,
                row.setting.to_string(),
                row.terminated.to_string(),
                row.total.to_string(),
            ])?;
        }
        Ok(())
    })
}

/// Every report artifact for one result set.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportBundle {
    pub summary_csv: String,
    pub table2_md: String,
    pub per_setting_md: String,
    pub personas_csv: String,
    pub early_termination_csv: String,
    pub warnings: Vec<String>,
}

impl ReportBundle {
    pub fn from_results(results: &[InstanceResult], opts: ReportOptions) -> Result<Self, ReportError> {
        if results.is_empty() {
            return Err(ReportError::Empty);
        }
        let set = build_reports(results);
        let (table2_md, warnings) = render_table2(&set, opts)?;
        Ok(Self {
            summary_csv: render_summary_csv(&set),
            table2_md,
            per_setting_md: render_setting_tables(&set),
            personas_csv: render_personas_csv(results),
            early_termination_csv: render_early_termination_csv(results),
            warnings,
        })
    }

    /// `(file name, contents)` for each artifact.
    pub fn files(&self) -> [(&'static str, &str); 5] {
        [
            ("summary.csv", &self.summary_csv),
            ("table2.md", &self.table2_md),
            ("per_setting.md", &self.per_setting_md),
            ("personas.csv", &self.personas_csv),
            ("early_termination.csv", &self.early_termination_csv),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(method: Strategy, task: &str, setting: Setting, id: &str, score: Option<f64>) -> InstanceResult {
        InstanceResult {
            instance_id: id.into(),
            task: task.into(),
            method,
            setting,
            roles: vec![],
            score,
            parse_flags: vec![],
            early_terminated: false,
            skipped: score.is_none(),
            skip_reason: score.is_none().then(|| "content_filter".into()),
        }
    }

    fn standard() -> Strategy {
        Strategy::new(StrategyKind::Standard)
    }

    fn spp() -> Strategy {
        Strategy::new(StrategyKind::Spp)
    }

    #[test]
    fn table2_cell_from_setting_values() {
        let t = "trivia_creative_writing_n5";
        let rs = vec![
            result(standard(), t, Setting::WithSystemMessage, "a", Some(0.756)),
            result(standard(), t, Setting::WithoutSystemMessage, "a", Some(0.736)),
            result(spp(), t, Setting::WithSystemMessage, "a", Some(0.800)),
            result(spp(), t, Setting::WithoutSystemMessage, "a", Some(0.798)),
        ];
        let (md, warnings) = render_table2(&build_reports(&rs), ReportOptions::default()).unwrap();
        assert!(warnings.is_empty());
        assert!(md.contains("| Standard | 74.6 |"), "{md}");
        assert!(md.contains("| SPP | 79.9 (+7.1%) |"), "{md}");
    }

    #[test]
    fn missing_baseline_warns_or_fails() {
        let rs = vec![result(spp(), "logic_grid_puzzle", Setting::WithSystemMessage, "a", Some(1.0))];
        let set = build_reports(&rs);
        let (md, warnings) = render_table2(&set, ReportOptions::default()).unwrap();
        assert_eq!(warnings.len(), 1);
        assert!(md.contains("| SPP | 100.0 |"));
        assert_eq!(
            render_table2(&set, ReportOptions { require_baseline: true }),
            Err(ReportError::MissingBaseline("logic_grid_puzzle".into()))
        );
        assert_eq!(ReportBundle::from_results(&[], ReportOptions::default()), Err(ReportError::Empty));
    }

    #[test]
    fn skipped_instances_counted_separately() {
        let rs = vec![
            result(standard(), "logic_grid_puzzle", Setting::WithSystemMessage, "a", Some(1.0)),
            result(standard(), "logic_grid_puzzle", Setting::WithSystemMessage, "b", None),
            result(standard(), "logic_grid_puzzle", Setting::WithSystemMessage, "c", Some(0.0)),
        ];
        let csv = render_summary_csv(&build_reports(&rs));
        assert_eq!(csv, "method,task,setting,n_scored,n_skipped,mean\nstandard,logic_grid_puzzle,with_system_message,2,1,50.0\n");
    }

    #[test]
    fn task_columns_ordered() {
        let rs: Vec<_> = ["logic_grid_puzzle", "codenames_collaborative", "trivia_creative_writing_n10", "trivia_creative_writing_n5"]
            .into_iter()
            .map(|t| result(standard(), t, Setting::WithSystemMessage, "a", Some(1.0)))
            .collect();
        assert_eq!(
            build_reports(&rs).tasks(),
            ["trivia_creative_writing_n5", "trivia_creative_writing_n10", "codenames_collaborative", "logic_grid_puzzle"]
        );
    }

    #[test]
    fn setting_tables_have_average_and_max() {
        let t = "codenames_collaborative";
        let rs = vec![
            result(spp(), t, Setting::WithSystemMessage, "a", Some(0.794)),
            result(spp(), t, Setting::WithoutSystemMessage, "a", Some(0.825)),
        ];
        let md = render_setting_tables(&build_reports(&rs));
        assert!(md.contains("| SPP | 79.4 | 82.5 | 81.0 | 82.5 |"), "{md}");
    }
}
