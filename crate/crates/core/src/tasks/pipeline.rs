use serde::{Deserialize, Serialize};

use super::{
    parse_hint_answer, render_guesser_task, render_logic_task, render_spymaster_task, render_trivia_task,
    score_codenames_answer, score_logic_answer, score_trivia, OutputFormat, TaskRole, TaskScore,
};
use crate::backend::ChatBackend;
use crate::model::{GenerationParams, Setting, Strategy, StrategyOutcome, TaskInstance, TaskPayload};
use crate::strategies::{run_strategy, PromptTemplateSet, RunError};

/// Everything needed to evaluate instances under one system-message setting.
#[derive(Clone, Copy)]
pub struct InstanceContext<'a> {
    pub backend: &'a dyn ChatBackend,
    pub templates: &'a PromptTemplateSet,
    /// Already specialised to `setting`.
    pub params: &'a GenerationParams,
    pub setting: Setting,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoleOutcome {
    pub role: TaskRole,
    pub outcome: StrategyOutcome,
}

/// One line of `results.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceResult {
    pub instance_id: String,
    /// Report column, e.g. `trivia_creative_writing_n5`.
    pub task: String,
    pub method: Strategy,
    pub setting: Setting,
    pub roles: Vec<RoleOutcome>,
    /// `None` when skipped.
    pub score: Option<f64>,
    pub parse_flags: Vec<String>,
    /// Some role's transcript listed participants but never produced a final answer.
    pub early_terminated: bool,
    pub skipped: bool,
    pub skip_reason: Option<String>,
}

/// Report column of an instance. Trivia splits by question count.
pub fn task_column(instance: &TaskInstance) -> String {
    match &instance.payload {
        TaskPayload::Trivia(t) => format!("{}_n{}", instance.kind, t.n),
        _ => instance.kind.to_string(),
    }
}

/// Runs `strategy` on every role of `instance` and scores the result.
///
/// Codenames runs the Spymaster first; if no usable hint comes back the instance scores 0
/// and the Guesser is not called.
pub fn evaluate_instance(
    instance: &TaskInstance,
    strategy: Strategy,
    ctx: &InstanceContext<'_>,
) -> Result<InstanceResult, RunError> {
    let mut result = InstanceResult {
        instance_id: instance.id.clone(),
        task: task_column(instance),
        method: strategy,
        setting: ctx.setting,
        roles: Vec::new(),
        score: None,
        parse_flags: Vec::new(),
        early_terminated: false,
        skipped: false,
        skip_reason: None,
    };
    let run = |task_text: &str, format: OutputFormat| {
        run_strategy(&instance.id, task_text, format, strategy, ctx.backend, ctx.templates, ctx.params)
    };

    let score = match &instance.payload {
        TaskPayload::Trivia(trivia) => {
            let outcome = run(&render_trivia_task(trivia), OutputFormat::TriviaStory)?;
            let score = match outcome.extracted_answer.as_deref() {
                Some(story) => TaskScore::clean(score_trivia(story, trivia)),
                None => TaskScore::flagged(0.0, "writer output has no final answer"),
            };
            result.push(TaskRole::Writer, outcome);
            score
        }
        TaskPayload::Codenames(codenames) => {
            let spymaster = run(&render_spymaster_task(codenames), OutputFormat::CodenamesHint)?;
            let hint = parse_hint_answer(spymaster.extracted_answer.as_deref());
            let spymaster_skipped = spymaster.skipped;
            result.push(TaskRole::Spymaster, spymaster);
            match hint {
                _ if spymaster_skipped => TaskScore::clean(0.0),
                Err(e) => TaskScore::flagged(0.0, format!("spymaster: {e}")),
                Ok(hint) => {
                    let task = render_guesser_task(codenames, &hint, codenames.guess_count());
                    let guesser = run(&task, OutputFormat::CodenamesGuesses)?;
                    let score = score_codenames_answer(guesser.extracted_answer.as_deref(), codenames);
                    result.push(TaskRole::Guesser, guesser);
                    score
                }
            }
        }
        TaskPayload::LogicPuzzle(logic) => {
            let outcome = run(&render_logic_task(logic), OutputFormat::HouseNumber)?;
            let score = score_logic_answer(outcome.extracted_answer.as_deref(), logic);
            result.push(TaskRole::Solver, outcome);
            score
        }
    };

    if let Some(skipped) = result.roles.iter().find(|r| r.outcome.skipped) {
        result.skipped = true;
        result.skip_reason = skipped.outcome.skip_reason.clone();
        return Ok(result);
    }
    result.score = Some(score.score);
    result.parse_flags.extend(score.parse_flag);
    Ok(result)
}

impl InstanceResult {
    fn push(&mut self, role: TaskRole, outcome: StrategyOutcome) {
        if let Some(e) = &outcome.parse_error {
            self.parse_flags.push(format!("{}: {e}", role_name(role)));
        }
        if outcome.parsed.as_ref().is_some_and(|p| p.early_terminated) {
            self.early_terminated = true;
        }
        self.roles.push(RoleOutcome { role, outcome });
    }

    /// Builds a skipped record for an instance whose backend call failed outright.
    pub fn failed(instance: &TaskInstance, method: Strategy, setting: Setting, reason: String) -> Self {
        Self {
            instance_id: instance.id.clone(),
            task: task_column(instance),
            method,
            setting,
            roles: Vec::new(),
            score: None,
            parse_flags: Vec::new(),
            early_terminated: false,
            skipped: true,
            skip_reason: Some(reason),
        }
    }
}

fn role_name(role: TaskRole) -> &'static str {
    match role {
        TaskRole::Writer => "writer",
        TaskRole::Spymaster => "spymaster",
        TaskRole::Guesser => "guesser",
        TaskRole::Solver => "solver",
    }
}
