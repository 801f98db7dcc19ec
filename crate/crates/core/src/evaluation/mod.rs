//! Aggregation of per-instance scores into report tables.

mod report;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ParsedTranscript, ScoreReport, Setting, Strategy, StrategyOutcome};
use crate::tasks::InstanceResult;
use crate::text::persona_key;

pub use report::{
    build_reports, render_setting_tables, render_early_termination_csv, render_personas_csv, render_summary_csv,
    render_table2, ReportBundle, ReportError, ReportKey, ReportOptions, ReportSet,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AggregateError {
    #[error("{0} report has no scored instances")]
    EmptyReport(Setting),
    #[error("relative delta is undefined for a zero baseline")]
    ZeroBaseline,
    #[error("consistency statistics need at least two runs, got {0}")]
    TooFewRuns(usize),
}

/// Rounds half away from zero at `decimals` places.
///
/// Values are first snapped to 1e-6 of the last kept digit, so decimal ties that binary
/// floating point stores as x.x4999… still round up.
pub fn round_half_up(value: f64, decimals: u32) -> f64 {
    let factor = 10f64.powi(decimals as i32);
    let scaled = ((value * factor) * 1e6).round() / 1e6;
    (scaled.abs() + 0.5).floor() * scaled.signum() / factor
}

/// Formats with one decimal after half-up rounding. Negative zero prints as `0.0`.
pub fn format_1dp(value: f64) -> String {
    let r = round_half_up(value, 1);
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{r:.1}")
}

/// Reports for one method and task under both system-message settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingPair {
    pub with_system: ScoreReport,
    pub without_system: ScoreReport,
}

impl SettingPair {
    /// Instance ids present in either report.
    pub fn instance_ids(&self) -> BTreeSet<&str> {
        self.with_system
            .per_instance
            .iter()
            .chain(&self.without_system.per_instance)
            .map(|s| s.instance_id.as_str())
            .collect()
    }
}

/// Mean of the two setting means, and the larger of the two.
pub fn average_over_settings(pair: &SettingPair) -> Result<(f64, f64), AggregateError> {
    let with = pair.with_system.mean.ok_or(AggregateError::EmptyReport(Setting::WithSystemMessage))?;
    let without = pair.without_system.mean.ok_or(AggregateError::EmptyReport(Setting::WithoutSystemMessage))?;
    Ok(average_and_max(with, without))
}

pub fn average_and_max(a: f64, b: f64) -> (f64, f64) {
    ((a + b) / 2.0, a.max(b))
}

/// Change of `method_mean` relative to `standard_mean`, in percent.
pub fn relative_delta(method_mean: f64, standard_mean: f64) -> Result<f64, AggregateError> {
    if standard_mean == 0.0 {
        return Err(AggregateError::ZeroBaseline);
    }
    Ok((method_mean - standard_mean) / standard_mean * 100.0)
}

/// Arithmetic mean and sample standard deviation (n − 1 denominator).
pub fn consistency_stats(run_means: &[f64]) -> Result<(f64, f64), AggregateError> {
    let n = run_means.len();
    if n < 2 {
        return Err(AggregateError::TooFewRuns(n));
    }
    let mean = run_means.iter().sum::<f64>() / n as f64;
    let var = run_means.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Ok((mean, var.sqrt()))
}

/// How many transcripts mention each persona, keyed by normalized name.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersonaFrequency {
    pub counts: BTreeMap<String, usize>,
    pub total_transcripts: usize,
}

impl PersonaFrequency {
    /// Personas by descending count, ties broken by name.
    pub fn sorted(&self) -> Vec<(&str, usize)> {
        let mut rows: Vec<(&str, usize)> = self.counts.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        rows.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        rows
    }
}

pub fn persona_frequencies<'a>(transcripts: impl IntoIterator<Item = &'a ParsedTranscript>) -> PersonaFrequency {
    let mut freq = PersonaFrequency::default();
    for transcript in transcripts {
        freq.total_transcripts += 1;
        let distinct: BTreeSet<String> = transcript.participants.iter().map(|p| persona_key(p)).collect();
        for persona in distinct {
            *freq.counts.entry(persona).or_default() += 1;
        }
    }
    freq
}

/// `(terminated, total)` over outcomes that carry a parsed transcript.
pub fn count_early_terminated<'a>(outcomes: impl IntoIterator<Item = &'a StrategyOutcome>) -> (usize, usize) {
    outcomes
        .into_iter()
        .filter_map(|o| o.parsed.as_ref())
        .fold((0, 0), |(t, n), p| (t + usize::from(p.early_terminated), n + 1))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EarlyTerminationRow {
    pub method: Strategy,
    pub task: String,
    pub setting: Setting,
    pub terminated: usize,
    pub total: usize,
}

/// Early-terminated instances per (method, task, setting), over SPP-family results.
///
/// An instance counts once even when several of its roles stopped early. Skipped
/// instances are excluded from both counts.
pub fn early_termination_stats(results: &[InstanceResult]) -> Vec<EarlyTerminationRow> {
    let mut groups: BTreeMap<(Strategy, String, Setting), (usize, usize)> = BTreeMap::new();
    for r in results.iter().filter(|r| r.method.kind.is_spp_family() && !r.skipped) {
        let entry = groups.entry((r.method, r.task.clone(), r.setting)).or_default();
        entry.0 += usize::from(r.early_terminated);
        entry.1 += 1;
    }
    groups
        .into_iter()
        .map(|((method, task, setting), (terminated, total))| EarlyTerminationRow { method, task, setting, terminated, total })
        .collect()
}


#[cfg(test)]
mod props {
    use proptest::prelude::*;

    use super::*;

    proptest! {
        #[test]
        fn average_commutes(a in 0.0f64..100.0, b in 0.0f64..100.0) {
            prop_assert_eq!(average_and_max(a, b), average_and_max(b, a));
        }

        #[test]
        fn delta_sign(a in 0.01f64..100.0, b in 0.01f64..100.0) {
            let d = relative_delta(a, b).unwrap();
            prop_assert_eq!(relative_delta(a, a).unwrap(), 0.0);
            prop_assert_eq!(d > 0.0, a > b);
            prop_assert_eq!(d < 0.0, a < b);
        }

        #[test]
        fn consistency_permutation_invariant(mut xs in prop::collection::vec(0.0f64..100.0, 2..8), c in 0.0f64..100.0) {
            let (m1, s1) = consistency_stats(&xs).unwrap();
            xs.reverse();
            let (m2, s2) = consistency_stats(&xs).unwrap();
            prop_assert!((m1 - m2).abs() < 1e-9 && (s1 - s2).abs() < 1e-9);
            let constant = vec![c; xs.len()];
            prop_assert!(consistency_stats(&constant).unwrap().1.abs() < 1e-9);
        }

        #[test]
        fn persona_counts_bounded(lists in prop::collection::vec(prop::collection::vec("[A-C][a-c]{0,2}( \\(you\\))?", 0..6), 0..10)) {
            let ts: Vec<ParsedTranscript> = lists.iter().map(|l| ParsedTranscript {
                participants: l.clone(), profiles: None, brainstorm_remarks: vec![], turns: vec![],
                final_answer: None, early_terminated: false,
            }).collect();
            let f = persona_frequencies(&ts);
            prop_assert_eq!(f.total_transcripts, ts.len());
            for count in f.counts.values() {
                prop_assert!(*count <= f.total_transcripts);
            }
            let mass: usize = f.counts.values().sum();
            prop_assert!(mass <= f.counts.len() * f.total_transcripts);
        }

        #[test]
        fn rounding_is_within_half_step(x in -1000.0f64..1000.0) {
            prop_assert!((round_half_up(x, 1) - x).abs() <= 0.05 + 1e-9);
        }
    }
}
