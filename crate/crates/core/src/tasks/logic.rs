//! Logic Grid Puzzle: answer a question about house numbers from a set of clues.

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::strategies::extract_final_answer;
use crate::tasks::{OutputFormat, TaskScore};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogicPuzzleInstance {
    pub puzzle_text: String,
    pub question_text: String,
    pub gold_house_number: u32,
}

pub fn render_logic_task(instance: &LogicPuzzleInstance) -> String {
    format!("{}\n\n{}", instance.puzzle_text.trim(), instance.question_text.trim())
}

/// Number of houses declared by the puzzle ("There are 4 houses", "There are three houses"), if stated.
pub fn stated_house_count(puzzle_text: &str) -> Option<u32> {
    static RE: OnceLock<Regex> = OnceLock::new();
    let re = RE.get_or_init(|| {
        Regex::new(r"(?i)\bthere are (\d+|two|three|four|five|six|seven|eight|nine|ten) houses\b").unwrap()
    });
    let token = re.captures(puzzle_text)?.get(1)?.as_str().to_ascii_lowercase();
    match token.as_str() {
        "two" => Some(2),
        "three" => Some(3),
        "four" => Some(4),
        "five" => Some(5),
        "six" => Some(6),
        "seven" => Some(7),
        "eight" => Some(8),
        "nine" => Some(9),
        "ten" => Some(10),
        digits => digits.parse().ok(),
    }
}

/// 1.0 when the first integer of the final answer equals the gold house number.
pub fn score_logic_puzzle(answer: &str, instance: &LogicPuzzleInstance) -> TaskScore {
    score_logic_answer(
        extract_final_answer(answer, OutputFormat::HouseNumber).as_deref(),
        instance,
    )
}

/// Same as [`score_logic_puzzle`] but on an already extracted final answer.
pub fn score_logic_answer(answer: Option<&str>, instance: &LogicPuzzleInstance) -> TaskScore {
    let Some(answer) = answer else {
        return TaskScore::flagged(0.0, "no final answer");
    };
    match first_integer(answer) {
        Some(n) if n == u64::from(instance.gold_house_number) => TaskScore::clean(1.0),
        Some(_) => TaskScore::clean(0.0),
        None => TaskScore::flagged(0.0, "final answer has no house number"),
    }
}

fn first_integer(text: &str) -> Option<u64> {
    let start = text.find(|c: char| c.is_ascii_digit())?;
    let digits: String = text[start..].chars().take_while(|c| c.is_ascii_digit()).collect();
    digits.parse().ok()
}
