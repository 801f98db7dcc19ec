use thiserror::Error;

use super::{answer_for, parse_spp_transcript, render_feedback_prompt, render_prompt, render_refine_prompt, PromptTemplateSet, RenderError};
use crate::backend::{BackendError, ChatBackend, FinishReason};
use crate::model::{GenerationParams, PromptBundle, Strategy, StrategyKind, StrategyOutcome};
use crate::tasks::OutputFormat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error(transparent)]
    Backend(#[from] BackendError),
}

/// Executes one strategy on one task input.
///
/// Single-call strategies make one backend call. Self-Refine(k) makes an initial call and
/// then k rounds of feedback and refinement, each round conditioned on the latest output.
/// A content-filtered response ends the run early with `skipped` set.
#[allow(clippy::too_many_arguments)]
pub fn run_strategy(
    instance_id: &str,
    task_text: &str,
    format: OutputFormat,
    strategy: Strategy,
    backend: &dyn ChatBackend,
    templates: &PromptTemplateSet,
    params: &GenerationParams,
) -> Result<StrategyOutcome, RunError> {
    let mut outcome = StrategyOutcome {
        instance_id: instance_id.to_string(),
        strategy,
        raw_generations: Vec::new(),
        parsed: None,
        parse_error: None,
        extracted_answer: None,
        llm_call_count: 0,
        skipped: false,
        skip_reason: None,
    };

    let first = render_prompt(strategy, instance_id, task_text, format, templates, params)?;
    if !call(backend, &first, params, &mut outcome)? {
        return Ok(outcome);
    }

    if let StrategyKind::SelfRefine { iterations } = strategy.kind {
        for _ in 0..iterations {
            let current = outcome.raw_generations.last().cloned().unwrap_or_default();
            let feedback_prompt = render_feedback_prompt(strategy, instance_id, task_text, &current, templates, params);
            if !call(backend, &feedback_prompt, params, &mut outcome)? {
                return Ok(outcome);
            }
            let feedback = outcome.raw_generations.last().cloned().unwrap_or_default();
            let refine_prompt =
                render_refine_prompt(strategy, instance_id, task_text, &current, &feedback, format, templates, params);
            if !call(backend, &refine_prompt, params, &mut outcome)? {
                return Ok(outcome);
            }
        }
    }

    let last = outcome.raw_generations.last().cloned().unwrap_or_default();
    outcome.extracted_answer = answer_for(strategy.kind, &last, format);
    if strategy.kind.is_spp_family() {
        match parse_spp_transcript(&last) {
            Ok(parsed) => {
                if strategy.kind == StrategyKind::SppProfile {
                    let missing: Vec<&str> = parsed
                        .participants
                        .iter()
                        .filter(|p| parsed.profiles.as_ref().is_none_or(|m| !m.contains_key(*p)))
                        .map(String::as_str)
                        .collect();
                    if !missing.is_empty() {
                        outcome.parse_error = Some(format!("participants without profile: {}", missing.join(", ")));
                    }
                }
                outcome.parsed = Some(parsed);
            }
            Err(e) => outcome.parse_error = Some(e.to_string()),
        }
    }
    Ok(outcome)
}

/// Issues one call and records it. Returns false when the response was content-filtered.
fn call(
    backend: &dyn ChatBackend,
    bundle: &PromptBundle,
    params: &GenerationParams,
    outcome: &mut StrategyOutcome,
) -> Result<bool, RunError> {
    let completion = backend.complete(bundle, params)?;
    outcome.llm_call_count += 1;
    outcome.raw_generations.push(completion.text);
    if completion.finish_reason == FinishReason::ContentFilter {
        outcome.skipped = true;
        outcome.skip_reason = Some("content_filter".to_string());
        return Ok(false);
    }
    Ok(true)
}
