use std::sync::OnceLock;

use regex::{Captures, Regex};
use thiserror::Error;

use crate::model::{DemoVariant, GenerationParams, PromptBundle, Strategy, StrategyKind};
use crate::strategies::PromptTemplateSet;
use crate::tasks::OutputFormat;

/// Separator between the principle, each demonstration and the task prefix.
const DEMO_SEPARATOR: &str = "\n\n---\n\n";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("task text is empty")]
    EmptyTask,
    #[error("invalid strategy configuration: {0}")]
    Config(#[from] crate::model::ConfigError),
}

/// Substitutes `{name}` placeholders in one pass, so values are never re-expanded.
pub fn fill_template(template: &str, values: &[(&str, &str)]) -> String {
    static RE: OnceLock<Regex> = OnceLock::new();
    let re = RE.get_or_init(|| Regex::new(r"\{([a-z_]+)\}").unwrap());
    re.replace_all(template, |caps: &Captures| {
        let key = &caps[1];
        values
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| v.to_string())
            .unwrap_or_else(|| caps[0].to_string())
    })
    .into_owned()
}

/// Renders the first (or only) prompt of `strategy` for one task input.
///
/// SPP-family: principle, demos, task prefix, task text, format instruction.
/// CoT: the plan-first template. Standard and Self-Refine's initial call: task text
/// plus the format instruction.
pub fn render_prompt(
    strategy: Strategy,
    instance_id: &str,
    task_text: &str,
    format: OutputFormat,
    templates: &PromptTemplateSet,
    params: &GenerationParams,
) -> Result<PromptBundle, RenderError> {
    strategy.validate()?;
    if task_text.trim().is_empty() {
        return Err(RenderError::EmptyTask);
    }
    let format_instruction = templates.format_instruction(format);
    let user = match strategy.kind {
        StrategyKind::Standard | StrategyKind::SelfRefine { .. } => {
            format!("{task_text}\n\n{format_instruction}")
        }
        StrategyKind::Cot => fill_template(
            &templates.cot_template,
            &[("task", task_text), ("format_instruction", format_instruction)],
        ),
        StrategyKind::Spp | StrategyKind::SppProfile | StrategyKind::SppFixedPersona => {
            let parts = templates.spp_parts(strategy.kind);
            let mut sections = vec![parts.system_principle, parts.demo_1];
            if strategy.demo_variant == DemoVariant::BothDemos {
                sections.push(parts.demo_2);
            }
            let mut text = sections.join(DEMO_SEPARATOR);
            text.push_str(DEMO_SEPARATOR);
            text.push_str(parts.task_prefix);
            text.push_str("\n\nTask: ");
            text.push_str(task_text);
            text.push_str("\n\n");
            text.push_str(format_instruction);
            text
        }
    };
    Ok(PromptBundle::single_turn(params.system_message.as_deref(), user, strategy, instance_id))
}

/// Self-Refine feedback call: critique of the current answer.
pub fn render_feedback_prompt(
    strategy: Strategy,
    instance_id: &str,
    task_text: &str,
    answer: &str,
    templates: &PromptTemplateSet,
    params: &GenerationParams,
) -> PromptBundle {
    let user = fill_template(
        &templates.self_refine_feedback_template,
        &[("task", task_text), ("answer", answer)],
    );
    PromptBundle::single_turn(params.system_message.as_deref(), user, strategy, instance_id)
}

/// Self-Refine refine call: task, current answer and feedback, asking for a revision.
#[allow(clippy::too_many_arguments)]
pub fn render_refine_prompt(
    strategy: Strategy,
    instance_id: &str,
    task_text: &str,
    answer: &str,
    feedback: &str,
    format: OutputFormat,
    templates: &PromptTemplateSet,
    params: &GenerationParams,
) -> PromptBundle {
    let user = fill_template(
        &templates.self_refine_refine_template,
        &[
            ("task", task_text),
            ("answer", answer),
            ("feedback", feedback),
            ("format_instruction", templates.format_instruction(format)),
        ],
    );
    PromptBundle::single_turn(params.system_message.as_deref(), user, strategy, instance_id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fill_is_single_pass() {
        let out = fill_template("A={a} B={b} C={c}", &[("a", "{b}"), ("b", "x")]);
        assert_eq!(out, "A={b} B=x C={c}");
    }
}
