//! Solo Performance Prompting (SPP) evaluation harness.
//!
//! A single model is prompted to identify task-specific personas and simulate their
//! multi-turn collaboration before committing to a final answer. This crate renders the
//! prompts for SPP and its baselines, runs them against a chat-completion backend,
//! parses the resulting transcripts, scores three benchmark tasks and aggregates the
//! scores into report tables.

pub mod backend;
pub mod evaluation;
pub mod model;
pub mod strategies;
pub mod tasks;
pub mod text;

pub use backend::{
    cache_key, record_replay_store, BackendError, ChatBackend, ChatBackendConfig, Completion, FinishReason,
    HttpBackend, MockBackend, RecordReplayBackend, ReplayMode,
};
pub use evaluation::{
    average_over_settings, consistency_stats, early_termination_stats, persona_frequencies, relative_delta,
    round_half_up, PersonaFrequency, SettingPair,
};
pub use model::{
    ChatMessage, ChatRole, ConfigError, DemoVariant, GenerationParams, InstanceScore, ParsedTranscript, PromptBundle,
    ScoreReport, Setting, Strategy, StrategyKind, StrategyOutcome, TaskInstance, TaskKind, TaskPayload, Utterance,
    DEFAULT_SYSTEM_MESSAGE,
};
pub use strategies::{
    extract_final_answer, parse_spp_transcript, render_prompt, run_strategy, PromptTemplateSet, RunError,
    TranscriptError,
};
pub use tasks::{
    evaluate_instance, load_dataset, score_codenames, score_logic_puzzle, score_trivia, InstanceContext,
    InstanceResult, OutputFormat,
};
