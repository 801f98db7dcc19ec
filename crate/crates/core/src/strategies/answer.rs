use crate::model::StrategyKind;
use crate::tasks::OutputFormat;

/// Text after the last answer marker, trimmed. `None` when the marker is absent or nothing follows it.
///
/// The marker is matched ASCII case-insensitively anywhere in the text.
pub fn extract_final_answer(raw: &str, format: OutputFormat) -> Option<String> {
    let marker = format.marker().to_ascii_lowercase();
    // ASCII lowercasing keeps byte offsets aligned with `raw`.
    let lowered = raw.to_ascii_lowercase();
    let pos = lowered.rfind(&marker)?;
    let answer = raw[pos + marker.len()..].trim();
    (!answer.is_empty()).then(|| answer.to_string())
}

/// Last block of text separated from the rest by a blank line.
pub fn last_paragraph(raw: &str) -> Option<String> {
    let mut paragraphs = Vec::new();
    let mut current = Vec::new();
    for line in raw.lines() {
        if line.trim().is_empty() {
            if !current.is_empty() {
                paragraphs.push(current.join("\n"));
                current.clear();
            }
        } else {
            current.push(line.trim_end());
        }
    }
    if !current.is_empty() {
        paragraphs.push(current.join("\n"));
    }
    paragraphs.pop().map(|p| p.trim().to_string())
}

/// The answer used for scoring: the marked final answer, or for single-path baselines
/// (Standard, CoT, Self-Refine) the last paragraph when the model skipped the marker.
pub fn answer_for(kind: StrategyKind, raw: &str, format: OutputFormat) -> Option<String> {
    extract_final_answer(raw, format).or_else(|| {
        if kind.is_spp_family() {
            None
        } else {
            last_paragraph(raw)
        }
    })
}
