//! Shared vocabulary: task instances, strategies, prompts, transcripts, outcomes and score reports.
//!
//! Every type here is an immutable value with a canonical snake_case JSON form, which is
//! what the JSONL run logs contain.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::num::NonZeroU32;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::tasks::{stated_house_count, CodenamesInstance, LogicPuzzleInstance, TriviaInstance};
use crate::text::normalize;

/// System message used for the "with system message" inference setting.
pub const DEFAULT_SYSTEM_MESSAGE: &str = "You are an AI assistant that helps people find information.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    TriviaCreativeWriting,
    CodenamesCollaborative,
    LogicGridPuzzle,
}

impl TaskKind {
    pub const ALL: [TaskKind; 3] = [
        TaskKind::TriviaCreativeWriting,
        TaskKind::CodenamesCollaborative,
        TaskKind::LogicGridPuzzle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::TriviaCreativeWriting => "trivia_creative_writing",
            TaskKind::CodenamesCollaborative => "codenames_collaborative",
            TaskKind::LogicGridPuzzle => "logic_grid_puzzle",
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TaskKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| ConfigError::UnknownTask(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum TaskPayload {
    Trivia(TriviaInstance),
    Codenames(CodenamesInstance),
    LogicPuzzle(LogicPuzzleInstance),
}

impl TaskPayload {
    pub fn kind(&self) -> TaskKind {
        match self {
            TaskPayload::Trivia(_) => TaskKind::TriviaCreativeWriting,
            TaskPayload::Codenames(_) => TaskKind::CodenamesCollaborative,
            TaskPayload::LogicPuzzle(_) => TaskKind::LogicGridPuzzle,
        }
    }
}

/// One benchmark item: the task input plus its gold data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TaskInstance {
    pub id: String,
    pub kind: TaskKind,
    pub payload: TaskPayload,
}

impl<'de> Deserialize<'de> for TaskInstance {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            id: String,
            kind: TaskKind,
            payload: serde_json::Value,
        }
        let raw = Raw::deserialize(deserializer)?;
        // The payload schema is chosen by the kind tag so errors name the missing field.
        let payload = match raw.kind {
            TaskKind::TriviaCreativeWriting => serde_json::from_value(raw.payload).map(TaskPayload::Trivia),
            TaskKind::CodenamesCollaborative => serde_json::from_value(raw.payload).map(TaskPayload::Codenames),
            TaskKind::LogicGridPuzzle => serde_json::from_value(raw.payload).map(TaskPayload::LogicPuzzle),
        }
        .map_err(|e| D::Error::custom(format!("payload: {e}")))?;
        Ok(TaskInstance { id: raw.id, kind: raw.kind, payload })
    }
}

/// One violated rule on a task instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl Violation {
    fn new(field: &str, message: impl Into<String>) -> Self {
        Self { field: field.to_string(), message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Checks every instance invariant and returns the violations, empty when the instance is valid.
pub fn validate_instance(instance: &TaskInstance) -> Vec<Violation> {
    let mut out = Vec::new();
    if instance.id.trim().is_empty() {
        out.push(Violation::new("id", "empty id"));
    }
    if instance.payload.kind() != instance.kind {
        out.push(Violation::new(
            "payload",
            format!("payload is {} but kind is {}", instance.payload.kind(), instance.kind),
        ));
    }
    match &instance.payload {
        TaskPayload::Trivia(t) => validate_trivia(t, &mut out),
        TaskPayload::Codenames(c) => validate_codenames(c, &mut out),
        TaskPayload::LogicPuzzle(l) => validate_logic(l, &mut out),
    }
    out
}

fn validate_trivia(t: &TriviaInstance, out: &mut Vec<Violation>) {
    if t.topic.trim().is_empty() {
        out.push(Violation::new("topic", "empty topic"));
    }
    if t.questions.len() != t.n {
        out.push(Violation::new("questions", format!("question count {} ≠ {}", t.questions.len(), t.n)));
    }
    for (i, q) in t.questions.iter().enumerate() {
        let field = format!("questions[{i}]");
        if q.text.trim().is_empty() {
            out.push(Violation::new(&field, "empty question text"));
        }
        if q.answer_aliases.is_empty() {
            out.push(Violation::new(&field, "no answer aliases"));
        }
        let mut seen = HashSet::new();
        for alias in &q.answer_aliases {
            let key = normalize(alias);
            if key.is_empty() {
                out.push(Violation::new(&field, "empty answer alias"));
            } else if !seen.insert(key) {
                out.push(Violation::new(&field, format!("duplicate alias {alias:?}")));
            }
        }
    }
}

fn validate_codenames(c: &CodenamesInstance, out: &mut Vec<Violation>) {
    if c.target_words.is_empty() {
        out.push(Violation::new("target_words", "no target words"));
    }
    let targets: Vec<String> = c.target_words.iter().map(|w| normalize(w)).collect();
    let board: Vec<String> = c.all_words.iter().map(|w| normalize(w)).collect();
    for (i, t) in targets.iter().enumerate() {
        if targets[..i].contains(t) {
            out.push(Violation::new("target_words", format!("duplicate target {:?}", c.target_words[i])));
        }
        if !board.contains(t) {
            out.push(Violation::new("target_words", format!("target {:?} not in all_words", c.target_words[i])));
        }
    }
    for (i, w) in board.iter().enumerate() {
        if w.is_empty() {
            out.push(Violation::new("all_words", "empty word"));
        } else if board[..i].contains(w) {
            out.push(Violation::new("all_words", format!("duplicate word {:?}", c.all_words[i])));
        }
    }
}

fn validate_logic(l: &LogicPuzzleInstance, out: &mut Vec<Violation>) {
    if l.puzzle_text.trim().is_empty() {
        out.push(Violation::new("puzzle_text", "empty puzzle"));
    }
    if l.question_text.trim().is_empty() {
        out.push(Violation::new("question_text", "empty question"));
    }
    if l.gold_house_number == 0 {
        out.push(Violation::new("gold_house_number", "house numbers start at 1"));
    }
    if let Some(houses) = stated_house_count(&l.puzzle_text) {
        if l.gold_house_number > houses {
            out.push(Violation::new(
                "gold_house_number",
                format!("house {} outside 1..={houses}", l.gold_house_number),
            ));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("unknown method {0:?}")]
    UnknownMethod(String),
    #[error("unknown task {0:?}")]
    UnknownTask(String),
    #[error("demo variant {variant} only applies to SPP-family methods, not {method}")]
    DemoVariantNotApplicable { variant: String, method: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum StrategyKind {
    Standard,
    Cot,
    SelfRefine { iterations: u32 },
    Spp,
    SppProfile,
    SppFixedPersona,
}

impl StrategyKind {
    pub fn is_spp_family(self) -> bool {
        matches!(self, StrategyKind::Spp | StrategyKind::SppProfile | StrategyKind::SppFixedPersona)
    }

    /// Backend calls per role-turn.
    pub fn calls_per_turn(self) -> u32 {
        match self {
            StrategyKind::SelfRefine { iterations } => 1 + 2 * iterations,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DemoVariant {
    #[default]
    BothDemos,
    FirstDemoOnly,
}

/// A prompting method plus its demonstration variant.
///
/// Textual form: `standard`, `cot`, `self_refine` (one iteration), `self_refine:<k>`, `spp`,
/// `spp_profile`, `spp_fixed_persona`, with an optional `+first_demo` suffix on SPP methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Strategy {
    pub kind: StrategyKind,
    pub demo_variant: DemoVariant,
}

impl Strategy {
    pub const fn new(kind: StrategyKind) -> Self {
        Self { kind, demo_variant: DemoVariant::BothDemos }
    }

    pub fn with_demo_variant(self, demo_variant: DemoVariant) -> Result<Self, ConfigError> {
        let s = Self { kind: self.kind, demo_variant };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.demo_variant != DemoVariant::BothDemos && !self.kind.is_spp_family() {
            return Err(ConfigError::DemoVariantNotApplicable {
                variant: "first_demo".into(),
                method: self.to_string(),
            });
        }
        Ok(())
    }

    /// Every strategy variant exercised by the harness, paired with a few iteration counts.
    pub fn catalog() -> Vec<Strategy> {
        let mut out = vec![
            Strategy::new(StrategyKind::Standard),
            Strategy::new(StrategyKind::Cot),
            Strategy::new(StrategyKind::SelfRefine { iterations: 0 }),
            Strategy::new(StrategyKind::SelfRefine { iterations: 1 }),
            Strategy::new(StrategyKind::SelfRefine { iterations: 2 }),
            Strategy::new(StrategyKind::Spp),
            Strategy::new(StrategyKind::SppProfile),
            Strategy::new(StrategyKind::SppFixedPersona),
        ];
        out.push(Strategy { kind: StrategyKind::Spp, demo_variant: DemoVariant::FirstDemoOnly });
        out
    }

    /// Row label used in report tables.
    pub fn display_name(&self) -> String {
        let base = match self.kind {
            StrategyKind::Standard => "Standard".to_string(),
            StrategyKind::Cot => "CoT".to_string(),
            StrategyKind::SelfRefine { iterations } => format!("Self-Refine [iter={iterations}]"),
            StrategyKind::Spp => "SPP".to_string(),
            StrategyKind::SppProfile => "SPP-Profile".to_string(),
            StrategyKind::SppFixedPersona => "SPP-Fixed-Persona".to_string(),
        };
        match self.demo_variant {
            DemoVariant::BothDemos => base,
            DemoVariant::FirstDemoOnly => format!("{base} (first demo only)"),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            StrategyKind::Standard => f.write_str("standard")?,
            StrategyKind::Cot => f.write_str("cot")?,
            StrategyKind::SelfRefine { iterations } => write!(f, "self_refine:{iterations}")?,
            StrategyKind::Spp => f.write_str("spp")?,
            StrategyKind::SppProfile => f.write_str("spp_profile")?,
            StrategyKind::SppFixedPersona => f.write_str("spp_fixed_persona")?,
        }
        if self.demo_variant == DemoVariant::FirstDemoOnly {
            f.write_str("+first_demo")?;
        }
        Ok(())
    }
}

impl FromStr for Strategy {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || ConfigError::UnknownMethod(s.to_string());
        let trimmed = s.trim().to_ascii_lowercase();
        let (body, variant) = match trimmed.strip_suffix("+first_demo") {
            Some(body) => (body, DemoVariant::FirstDemoOnly),
            None => (trimmed.as_str(), DemoVariant::BothDemos),
        };
        let (name, arg) = match body.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (body, None),
        };
        let kind = match (name.replace('-', "_").as_str(), arg) {
            ("standard", None) => StrategyKind::Standard,
            ("cot", None) => StrategyKind::Cot,
            ("self_refine", None) => StrategyKind::SelfRefine { iterations: 1 },
            ("self_refine", Some(k)) => StrategyKind::SelfRefine { iterations: k.parse().map_err(|_| unknown())? },
            ("spp", None) => StrategyKind::Spp,
            ("spp_profile", None) => StrategyKind::SppProfile,
            ("spp_fixed_persona", None) => StrategyKind::SppFixedPersona,
            _ => return Err(unknown()),
        };
        Strategy::new(kind).with_demo_variant(variant)
    }
}

/// Decoding parameters for one backend call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerationParams {
    pub model_name: String,
    pub temperature: f64,
    pub top_p: f64,
    /// Omitted from requests when unset.
    pub max_tokens: Option<NonZeroU32>,
    pub system_message: Option<String>,
}

impl Default for GenerationParams {
    fn default() -> Self {
        Self {
            model_name: "gpt-4".to_string(),
            temperature: 0.0,
            top_p: 1.0,
            max_tokens: None,
            system_message: None,
        }
    }
}

impl GenerationParams {
    /// Copy of these params for the given system-message setting.
    pub fn for_setting(&self, setting: Setting) -> Self {
        let mut p = self.clone();
        p.system_message = match setting {
            Setting::WithSystemMessage => {
                Some(self.system_message.clone().unwrap_or_else(|| DEFAULT_SYSTEM_MESSAGE.to_string()))
            }
            Setting::WithoutSystemMessage => None,
        };
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChatRole {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: ChatRole,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        Self { role: ChatRole::System, content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        Self { role: ChatRole::User, content: content.into() }
    }
}

/// Fully rendered message sequence for one backend call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub messages: Vec<ChatMessage>,
    pub strategy: Strategy,
    pub instance_id: String,
}

impl PromptBundle {
    /// Builds a bundle of an optional leading system message followed by one user message.
    pub fn single_turn(
        system_message: Option<&str>,
        user: String,
        strategy: Strategy,
        instance_id: &str,
    ) -> Self {
        let mut messages = Vec::with_capacity(2);
        if let Some(system) = system_message {
            messages.push(ChatMessage::system(system));
        }
        messages.push(ChatMessage::user(user));
        Self { messages, strategy, instance_id: instance_id.to_string() }
    }

    pub fn system_message(&self) -> Option<&str> {
        self.messages
            .first()
            .filter(|m| m.role == ChatRole::System)
            .map(|m| m.content.as_str())
    }

    /// Content of the last user message.
    pub fn user_message(&self) -> &str {
        self.messages
            .iter()
            .rev()
            .find(|m| m.role == ChatRole::User)
            .map(|m| m.content.as_str())
            .unwrap_or("")
    }

    /// At most one system message, and only in first position.
    pub fn is_well_formed(&self) -> bool {
        !self.messages.is_empty()
            && self
                .messages
                .iter()
                .enumerate()
                .all(|(i, m)| m.role != ChatRole::System || i == 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    pub persona: String,
    pub text: String,
}

/// Structured view of a multi-persona generation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedTranscript {
    pub participants: Vec<String>,
    pub profiles: Option<BTreeMap<String, String>>,
    /// Remarks made before the leader's first solution.
    pub brainstorm_remarks: Vec<Utterance>,
    /// The leader's solutions and every remark after the first one.
    pub turns: Vec<Utterance>,
    pub final_answer: Option<String>,
    /// Participants were listed but the generation never reached a final answer.
    pub early_terminated: bool,
}

/// Everything one strategy produced for one role of one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyOutcome {
    pub instance_id: String,
    pub strategy: Strategy,
    /// One entry per backend call, in call order.
    pub raw_generations: Vec<String>,
    pub parsed: Option<ParsedTranscript>,
    pub parse_error: Option<String>,
    pub extracted_answer: Option<String>,
    pub llm_call_count: u32,
    pub skipped: bool,
    pub skip_reason: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Setting {
    WithSystemMessage,
    WithoutSystemMessage,
}

impl Setting {
    pub const BOTH: [Setting; 2] = [Setting::WithSystemMessage, Setting::WithoutSystemMessage];

    pub fn as_str(self) -> &'static str {
        match self {
            Setting::WithSystemMessage => "with_system_message",
            Setting::WithoutSystemMessage => "without_system_message",
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Setting {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "with" | "with_system_message" => Ok(Setting::WithSystemMessage),
            "without" | "without_system_message" => Ok(Setting::WithoutSystemMessage),
            other => Err(ConfigError::Invalid(format!("unknown system message setting {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceScore {
    pub instance_id: String,
    pub score: f64,
}

/// Scores for one method on one task under one setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub per_instance: Vec<InstanceScore>,
    /// Unweighted mean of `per_instance`; `None` when nothing was scored.
    pub mean: Option<f64>,
    pub n_scored: usize,
    pub n_skipped: usize,
    pub setting: Setting,
}

impl ScoreReport {
    /// Builds a report, summing in instance-id order so the mean is reproducible bit for bit.
    pub fn new(setting: Setting, mut per_instance: Vec<InstanceScore>, n_skipped: usize) -> Self {
        per_instance.sort_by(|a, b| a.instance_id.cmp(&b.instance_id));
        let n_scored = per_instance.len();
        let mean = (n_scored > 0)
            .then(|| per_instance.iter().map(|s| s.score).sum::<f64>() / n_scored as f64);
        Self { per_instance, mean, n_scored, n_skipped, setting }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tasks::Question;

    fn trivia(n: usize, questions: usize) -> TaskInstance {
        TaskInstance {
            id: "t1".into(),
            kind: TaskKind::TriviaCreativeWriting,
            payload: TaskPayload::Trivia(TriviaInstance {
                topic: "Harry Potter".into(),
                questions: (0..questions)
                    .map(|i| Question { text: format!("q{i}?"), answer_aliases: vec![format!("a{i}")] })
                    .collect(),
                n,
            }),
        }
    }

    fn codenames(targets: &[&str], board: &[&str]) -> TaskInstance {
        TaskInstance {
            id: "c1".into(),
            kind: TaskKind::CodenamesCollaborative,
            payload: TaskPayload::Codenames(CodenamesInstance {
                target_words: targets.iter().map(|s| s.to_string()).collect(),
                all_words: board.iter().map(|s| s.to_string()).collect(),
            }),
        }
    }

    #[test]
    fn valid_trivia_has_no_violations() {
        assert!(validate_instance(&trivia(5, 5)).is_empty());
    }

    #[test]
    fn short_trivia_reports_count() {
        let v = validate_instance(&trivia(5, 4));
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].message, "question count 4 ≠ 5");
        assert_eq!(v[0].field, "questions");
    }

    #[test]
    fn duplicate_target_found_by_pairwise_scan() {
        let inst = codenames(&["apple", "Apple", "pear"], &["apple", "pear", "car"]);
        let v = validate_instance(&inst);
        // brute force: count pairs i<j with equal normalized targets
        let targets = ["apple", "Apple", "pear"];
        let mut dup_pairs = 0;
        for i in 0..targets.len() {
            for j in i + 1..targets.len() {
                if normalize(targets[i]) == normalize(targets[j]) {
                    dup_pairs += 1;
                }
            }
        }
        let reported = v.iter().filter(|x| x.message.starts_with("duplicate target")).count();
        assert_eq!(reported, dup_pairs);
        assert_eq!(reported, 1);
    }

    #[test]
    fn target_off_board_and_duplicate_board_words() {
        let v = validate_instance(&codenames(&["moon"], &["sun", "sun"]));
        let msgs: Vec<_> = v.iter().map(|x| x.message.as_str()).collect();
        assert!(msgs.iter().any(|m| m.contains("not in all_words")));
        assert!(msgs.iter().any(|m| m.starts_with("duplicate word")));
    }

    #[test]
    fn logic_gold_outside_house_range() {
        let inst = TaskInstance {
            id: "l1".into(),
            kind: TaskKind::LogicGridPuzzle,
            payload: TaskPayload::LogicPuzzle(LogicPuzzleInstance {
                puzzle_text: "There are 3 houses.".into(),
                question_text: "Where?".into(),
                gold_house_number: 4,
            }),
        };
        assert_eq!(validate_instance(&inst).len(), 1);
    }

    #[test]
    fn kind_payload_mismatch() {
        let mut inst = trivia(1, 1);
        inst.kind = TaskKind::LogicGridPuzzle;
        assert!(validate_instance(&inst).iter().any(|v| v.field == "payload"));
    }

    #[test]
    fn missing_alias_field_is_named() {
        let line = r#"{"id":"x","kind":"trivia_creative_writing","payload":{"topic":"t","n":1,"questions":[{"text":"q"}]}}"#;
        let err = serde_json::from_str::<TaskInstance>(line).unwrap_err().to_string();
        assert!(err.contains("answer_aliases"), "{err}");
    }

    #[test]
    fn strategy_text_forms() {
        for s in Strategy::catalog() {
            assert_eq!(s.to_string().parse::<Strategy>().unwrap(), s);
        }
        assert_eq!(
            "self_refine".parse::<Strategy>().unwrap().kind,
            StrategyKind::SelfRefine { iterations: 1 }
        );
        assert!(matches!("tree_of_thought".parse::<Strategy>(), Err(ConfigError::UnknownMethod(_))));
        assert!("cot+first_demo".parse::<Strategy>().is_err());
    }

    #[test]
    fn default_params_follow_inference_config() {
        let p = GenerationParams::default();
        assert_eq!(p.temperature, 0.0);
        assert_eq!(p.top_p, 1.0);
        assert_eq!(
            p.for_setting(Setting::WithSystemMessage).system_message.as_deref(),
            Some("You are an AI assistant that helps people find information.")
        );
        assert_eq!(p.for_setting(Setting::WithoutSystemMessage).system_message, None);
    }

    #[test]
    fn score_report_mean_is_unweighted() {
        let r = ScoreReport::new(
            Setting::WithSystemMessage,
            vec![
                InstanceScore { instance_id: "b".into(), score: 1.0 },
                InstanceScore { instance_id: "a".into(), score: 0.5 },
            ],
            3,
        );
        assert_eq!(r.mean, Some(0.75));
        assert_eq!(r.n_scored, 2);
        assert_eq!(r.n_skipped, 3);
        assert_eq!(r.per_instance[0].instance_id, "a");
        assert_eq!(ScoreReport::new(Setting::WithSystemMessage, vec![], 1).mean, None);
    }
}
