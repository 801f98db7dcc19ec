//! Benchmark tasks: dataset ingestion, task text rendering, answer parsing and scoring.

mod codenames;
mod dataset;
mod logic;
mod pipeline;
mod trivia;

use serde::{Deserialize, Serialize};

pub use codenames::{
    parse_guesses, parse_hint, parse_hint_answer, render_guesser_task, render_spymaster_task,
    score_codenames, score_codenames_answer, CodenamesInstance, HintParseError,
};
pub use dataset::{load_dataset, scan_dataset, DatasetError, DatasetIssue, DatasetScan};
pub use logic::{
    render_logic_task, score_logic_answer, score_logic_puzzle, stated_house_count,
    LogicPuzzleInstance,
};
pub use pipeline::{evaluate_instance, task_column, InstanceContext, InstanceResult, RoleOutcome};
pub use trivia::{render_trivia_task, score_trivia, shuffle_questions, Question, TriviaInstance};

/// Marker every task's format instruction asks the model to emit before its answer.
pub const FINAL_ANSWER_MARKER: &str = "Final answer:";

/// The answer shape a prompt asks for. Selects the format instruction and the answer marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    TriviaStory,
    CodenamesHint,
    CodenamesGuesses,
    HouseNumber,
}

impl OutputFormat {
    pub const ALL: [OutputFormat; 4] = [
        OutputFormat::TriviaStory,
        OutputFormat::CodenamesHint,
        OutputFormat::CodenamesGuesses,
        OutputFormat::HouseNumber,
    ];

    pub fn marker(self) -> &'static str {
        FINAL_ANSWER_MARKER
    }
}

/// Sequential role inside one task instance. Codenames has two, the others one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskRole {
    Writer,
    Spymaster,
    Guesser,
    Solver,
}

/// A per-instance score with an optional note explaining why it was forced to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskScore {
    pub score: f64,
    pub parse_flag: Option<String>,
}

impl TaskScore {
    pub fn clean(score: f64) -> Self {
        Self { score, parse_flag: None }
    }

    pub fn flagged(score: f64, flag: impl Into<String>) -> Self {
        Self { score, parse_flag: Some(flag.into()) }
    }
}
