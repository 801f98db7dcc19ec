//! Prompting methods: prompt rendering, multi-call orchestration and transcript parsing.

mod answer;
mod render;
mod runner;
mod templates;
mod transcript;

pub use answer::{answer_for, extract_final_answer, last_paragraph};
pub use render::{fill_template, render_feedback_prompt, render_prompt, render_refine_prompt, RenderError};
pub use runner::{run_strategy, RunError};
pub use templates::{
    compute_checksums, FormatInstructions, PromptTemplateSet, SppOverrides, SppParts, TemplateError,
    TemplateManifest, MANIFEST_FILE, TEMPLATE_FIELDS,
};
pub use transcript::{parse_spp_transcript, TranscriptError};
