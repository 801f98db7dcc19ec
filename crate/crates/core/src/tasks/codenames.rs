//! Codenames Collaborative: a Spymaster hints at the target words, a Guesser recovers them.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::strategies::extract_final_answer;
use crate::tasks::{OutputFormat, TaskScore};
use crate::text::normalize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodenamesInstance {
    pub target_words: Vec<String>,
    /// Targets plus distractors, in board order.
    pub all_words: Vec<String>,
}

impl CodenamesInstance {
    /// Number of guesses the Guesser is asked for.
    pub fn guess_count(&self) -> usize {
        self.target_words.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HintParseError {
    #[error("spymaster output has no final answer")]
    MissingAnswer,
    #[error("hint is empty")]
    Empty,
    #[error("hint must be a single word, got {0:?}")]
    MultiWord(String),
}

pub fn render_spymaster_task(instance: &CodenamesInstance) -> String {
    format!(
        "Try to find a single word hint that can accurately represent and link the {} given words: \"{}\". \
         The key is to select a hint that does not cause confusion with other words from the following list: {}. \
         The hint must not be any of the words in the list.",
        instance.target_words.len(),
        instance.target_words.join(", "),
        instance.all_words.join(", "),
    )
}

/// Extracts the hint from a Spymaster generation's final answer.
pub fn parse_hint(spymaster_output: &str) -> Result<String, HintParseError> {
    parse_hint_answer(extract_final_answer(spymaster_output, OutputFormat::CodenamesHint).as_deref())
}

/// Same as [`parse_hint`] but on an already extracted final answer.
pub fn parse_hint_answer(answer: Option<&str>) -> Result<String, HintParseError> {
    let answer = answer.ok_or(HintParseError::MissingAnswer)?;
    let first_line = answer.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    let hint = strip_wrapping(first_line);
    if hint.is_empty() {
        return Err(HintParseError::Empty);
    }
    if hint.split_whitespace().count() > 1 {
        return Err(HintParseError::MultiWord(hint.to_string()));
    }
    Ok(hint.to_lowercase())
}

pub fn render_guesser_task(instance: &CodenamesInstance, hint: &str, k: usize) -> String {
    format!(
        "Try to identify the {k} words best associated with the word \"{hint}\" from the following list: {}. \
         Answer with exactly {k} words from the list.",
        instance.all_words.join(", "),
    )
}

/// Overlap between the Guesser's words and the targets, over the number of targets.
pub fn score_codenames(guesser_output: &str, instance: &CodenamesInstance) -> TaskScore {
    score_codenames_answer(
        extract_final_answer(guesser_output, OutputFormat::CodenamesGuesses).as_deref(),
        instance,
    )
}

/// Same as [`score_codenames`] but on an already extracted final answer.
pub fn score_codenames_answer(answer: Option<&str>, instance: &CodenamesInstance) -> TaskScore {
    let Some(answer) = answer else {
        return TaskScore::flagged(0.0, "guesser output has no final answer");
    };
    let board: BTreeSet<String> = instance.all_words.iter().map(|w| normalize(w)).collect();
    let targets: BTreeSet<String> = instance.target_words.iter().map(|w| normalize(w)).collect();
    if targets.is_empty() {
        return TaskScore::flagged(0.0, "instance has no target words");
    }
    let guesses: BTreeSet<String> = parse_guesses(answer)
        .into_iter()
        .filter(|g| board.contains(g))
        .collect();
    if guesses.is_empty() {
        return TaskScore::flagged(0.0, "no guessed word is on the board");
    }
    let hits = guesses.intersection(&targets).count();
    TaskScore::clean(hits as f64 / targets.len() as f64)
}

/// Splits a comma separated answer into normalized words. Commas are the only separator.
pub fn parse_guesses(answer: &str) -> Vec<String> {
    answer
        .split(',')
        .map(|part| normalize(strip_wrapping(part)))
        .filter(|w| !w.is_empty())
        .collect()
}

fn strip_wrapping(s: &str) -> &str {
    s.trim()
        .trim_end_matches('.')
        .trim_matches(|c| matches!(c, '"' | '\'' | '`' | '*'))
        .trim()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(ws: &[&str]) -> Vec<String> {
        ws.iter().map(|w| w.to_string()).collect()
    }

    fn fruit() -> CodenamesInstance {
        CodenamesInstance {
            target_words: words(&["apple", "banana", "cherry", "grape"]),
            all_words: words(&[
                "apple", "car", "banana", "piano", "cherry", "river", "grape", "moon", "lamp",
                "tiger", "cloud", "stone",
            ]),
        }
    }

    #[test]
    fn half_overlap() {
        let s = score_codenames("Final answer: apple, banana", &fruit());
        assert_eq!(s.score, 0.5);
        assert!(s.parse_flag.is_none());
    }

    #[test]
    fn duplicates_collapse_before_intersecting() {
        assert_eq!(score_codenames("Final answer: apple, apple, banana", &fruit()).score, 0.5);
    }

    #[test]
    fn off_board_words_are_dropped() {
        let s = score_codenames("Final answer: apple, kiwi, Banana.", &fruit());
        assert_eq!(s.score, 0.5);
    }

    #[test]
    fn missing_marker_flags_zero() {
        let s = score_codenames("apple, banana", &fruit());
        assert_eq!(s.score, 0.0);
        assert!(s.parse_flag.is_some());
    }

    #[test]
    fn and_is_not_a_separator() {
        let s = score_codenames("Final answer: apple and banana", &fruit());
        assert_eq!(s.score, 0.0);
    }

    #[test]
    fn hint_parsing() {
        assert_eq!(parse_hint("Final answer: Mythology").unwrap(), "mythology");
        assert_eq!(parse_hint("blah\nFinal answer: \"Orchard\".").unwrap(), "orchard");
        assert!(matches!(parse_hint("Final answer: ancient gods"), Err(HintParseError::MultiWord(_))));
        assert_eq!(parse_hint("Mythology"), Err(HintParseError::MissingAnswer));
        assert_eq!(parse_hint("Final answer:   "), Err(HintParseError::MissingAnswer));
    }

    #[test]
    fn spymaster_prompt_lists_targets_and_board() {
        let inst = fruit();
        let text = render_spymaster_task(&inst);
        assert!(text.contains("link the 4 given words: \"apple, banana, cherry, grape\""));
        let list = text.split("following list: ").nth(1).unwrap();
        let list = list.split(". The hint").next().unwrap();
        assert_eq!(list.split(", ").count(), 12);
    }

    #[test]
    fn singleton_target_prompt() {
        let inst = CodenamesInstance { target_words: words(&["moon"]), all_words: words(&["moon", "sun"]) };
        let text = render_spymaster_task(&inst);
        assert!(text.contains("link the 1 given words: \"moon\""));
        assert!(text.contains("following list: moon, sun."));
    }

    #[test]
    fn guesser_prompt_requests_k_words_in_board_order() {
        let inst = fruit();
        let text = render_guesser_task(&inst, "fruit", inst.guess_count());
        assert!(text.starts_with("Try to identify the 4 words best associated with the word \"fruit\""));
        assert!(text.contains("exactly 4 words"));
        assert!(text.contains(&inst.all_words.join(", ")));
    }
}
