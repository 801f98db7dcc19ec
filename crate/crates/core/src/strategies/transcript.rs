//! Parser for multi-persona transcripts.
//!
//! Expected layout:
//!
//! ```text
//! Participants: AI Assistant (you); Math Expert
//!
//! Math Expert: <brainstorm remark>
//! AI Assistant (you): <initial solution>
//! Math Expert: <feedback>
//! ...
//! Finish collaboration!
//!
//! Final answer: <answer>
//! ```
//!
//! Participants may instead be listed one per line under a bare `Participants:` header,
//! each optionally carrying `— profile: <description>`. A dialogue turn starts at a line
//! `<name>: ...` where `<name>` is a declared participant (compared after trimming, case
//! folding and dropping the `(you)` suffix). Remarks before the leader's first turn are
//! brainstorming; everything from the leader's first turn on is the collaboration.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use regex::Regex;
use thiserror::Error;

use crate::model::{ParsedTranscript, Utterance};
use crate::strategies::extract_final_answer;
use crate::tasks::OutputFormat;
use crate::text::persona_key;

const LEADER_KEY: &str = "ai assistant";
const FINISH_LINE: &str = "finish collaboration!";

/// Words that introduce structure rather than a speaker.
const NON_PERSONA_LABELS: &[&str] = &[
    "final answer", "participants", "profiles", "profile", "task", "input", "output", "note", "hint",
    "answer", "plan", "story", "question", "questions", "step", "steps", "example", "solution",
    "draft", "revised", "feedback", "summary", "poem", "title", "chapter", "reason", "reasoning",
    "explanation", "clue", "clues", "result", "conclusion", "guess", "guesses", "target words",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranscriptError {
    #[error("no participants section")]
    NoParticipants,
    #[error("turns labeled by undeclared personas: {}", .0.join(", "))]
    UnknownPersonas(Vec<String>),
}

/// Parses a raw generation into participants, brainstorm remarks, turns and the final answer.
///
/// A transcript that lists participants but never reaches a final answer is early-terminated.
/// A transcript without a participants section is a parse failure.
pub fn parse_spp_transcript(raw: &str) -> Result<ParsedTranscript, TranscriptError> {
    let lines: Vec<&str> = raw.lines().collect();
    let (participant_items, body_start) = participants_section(&lines).ok_or(TranscriptError::NoParticipants)?;

    let mut participants = Vec::new();
    let mut profiles = BTreeMap::new();
    let mut keys: Vec<String> = Vec::new();
    for item in participant_items {
        let (name, profile) = split_profile(&item);
        let name = name.trim().trim_start_matches(['-', '*', '•']).trim().to_string();
        if name.is_empty() {
            continue;
        }
        let key = persona_key(&name);
        if keys.contains(&key) {
            continue;
        }
        if let Some(profile) = profile {
            profiles.insert(name.clone(), profile);
        }
        keys.push(key);
        participants.push(name);
    }
    if participants.is_empty() {
        return Err(TranscriptError::NoParticipants);
    }

    let final_answer = extract_final_answer(raw, OutputFormat::TriviaStory);
    let body = dialogue_lines(&lines[body_start..]);

    let mut utterances: Vec<Utterance> = Vec::new();
    let mut unknown: Vec<String> = Vec::new();
    for line in body {
        match speaker_label(line) {
            Some((label, rest)) => {
                let key = persona_key(label);
                if let Some(idx) = keys.iter().position(|k| *k == key) {
                    utterances.push(Utterance { persona: participants[idx].clone(), text: rest.trim().to_string() });
                    continue;
                }
                if looks_like_persona(label) {
                    let label = label.trim().to_string();
                    if !unknown.contains(&label) {
                        unknown.push(label);
                    }
                    continue;
                }
                append(&mut utterances, line);
            }
            None => append(&mut utterances, line),
        }
    }
    if !unknown.is_empty() {
        return Err(TranscriptError::UnknownPersonas(unknown));
    }
    for u in &mut utterances {
        u.text = u.text.trim().to_string();
    }

    let leader_key = leader_key(&participants, &keys);
    let split = utterances
        .iter()
        .position(|u| persona_key(&u.persona) == leader_key)
        .unwrap_or(utterances.len());
    let turns = utterances.split_off(split);

    Ok(ParsedTranscript {
        participants,
        profiles: (!profiles.is_empty()).then_some(profiles),
        brainstorm_remarks: utterances,
        turns,
        early_terminated: final_answer.is_none(),
        final_answer,
    })
}

/// Finds the participant list. Returns the raw items and the index of the first line after it.
fn participants_section(lines: &[&str]) -> Option<(Vec<String>, usize)> {
    let header = lines.iter().position(|l| {
        let t = l.trim_start();
        t.len() >= 13 && t[..13].eq_ignore_ascii_case("participants:")
    })?;
    let inline = lines[header].trim_start()[13..].trim();
    if !inline.is_empty() {
        let sep = if inline.contains(';') { ';' } else { ',' };
        let items = inline.split(sep).map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
        return Some((items, header + 1));
    }
    let mut items = Vec::new();
    let mut idx = header + 1;
    while idx < lines.len() {
        let t = lines[idx].trim();
        if t.is_empty() {
            if items.is_empty() {
                idx += 1;
                continue;
            }
            break;
        }
        let is_item = t.starts_with(['-', '*', '•']);
        if !is_item && !items.is_empty() {
            break;
        }
        if !is_item {
            break;
        }
        items.push(t.to_string());
        idx += 1;
    }
    Some((items, idx))
}

fn split_profile(item: &str) -> (&str, Option<String>) {
    static RE: OnceLock<Regex> = OnceLock::new();
    let re = RE.get_or_init(|| Regex::new(r"(?i)\s*(?:—|–|--|-)\s*profile\s*:\s*").unwrap());
    match re.find(item) {
        Some(m) => (&item[..m.start()], Some(item[m.end()..].trim().to_string())),
        None => (item, None),
    }
}

/// Lines of the collaboration: up to `Finish collaboration!` or the last final answer marker.
fn dialogue_lines<'a>(lines: &[&'a str]) -> Vec<&'a str> {
    let last_marker = lines.iter().rposition(|l| l.to_ascii_lowercase().contains("final answer:"));
    let mut out = Vec::new();
    for (idx, line) in lines.iter().enumerate() {
        if line.trim().eq_ignore_ascii_case(FINISH_LINE) {
            break;
        }
        if Some(idx) == last_marker {
            let pos = line.to_ascii_lowercase().rfind("final answer:").expect("marker on this line");
            let head = &line[..pos];
            if !head.trim().is_empty() {
                out.push(head);
            }
            break;
        }
        out.push(line);
    }
    out
}

/// Splits `Name: text` into the label and the remainder.
fn speaker_label(line: &str) -> Option<(&str, &str)> {
    static RE: OnceLock<Regex> = OnceLock::new();
    let re = RE.get_or_init(|| Regex::new(r"^\s*([^:\s][^:]{0,60}?)\s*:(?:\s+|$)").unwrap());
    let caps = re.captures(line)?;
    let label = caps.get(1)?.as_str();
    Some((label, &line[caps.get(0)?.end()..]))
}

/// Title-case name of at most five words with no digits or sentence punctuation.
fn looks_like_persona(label: &str) -> bool {
    let label = label.trim();
    let words: Vec<&str> = label.split_whitespace().collect();
    if words.is_empty() || words.len() > 5 {
        return false;
    }
    if !label.chars().next().is_some_and(|c| c.is_uppercase()) {
        return false;
    }
    if label.chars().any(|c| c.is_ascii_digit() || matches!(c, '!' | '?' | '"' | ',' | ';')) {
        return false;
    }
    let key = persona_key(label);
    !NON_PERSONA_LABELS.contains(&key.as_str())
}

fn append(utterances: &mut [Utterance], line: &str) {
    if let Some(last) = utterances.last_mut() {
        last.text.push('\n');
        last.text.push_str(line.trim_end());
    }
}

fn leader_key(participants: &[String], keys: &[String]) -> String {
    if keys.iter().any(|k| k == LEADER_KEY) {
        return LEADER_KEY.to_string();
    }
    participants
        .iter()
        .zip(keys)
        .find(|(p, _)| p.to_lowercase().contains("(you)"))
        .map(|(_, k)| k.clone())
        .unwrap_or_else(|| keys[0].clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    const GAME_OF_24: &str = "Participants: AI Assistant (you); Math Expert\n\nStart collaboration!\n\n\
Math Expert: Think of 4 * 6.\n\
AI Assistant (you): Thanks! Initial: (12 / (1 + 1)) * 6 = 24\n\
Math Expert: That is 36, not 24.\n\
AI Assistant (you): Revised: 6 * (1 + 1) + 12 = 24\n\
Math Expert: Everything looks good!\n\nFinish collaboration!\n\nFinal answer: 6 * (1 + 1) + 12 = 24";

    #[test]
    fn splits_brainstorm_from_turns() {
        let t = parse_spp_transcript(GAME_OF_24).unwrap();
        assert_eq!(t.participants, vec!["AI Assistant (you)", "Math Expert"]);
        assert_eq!(t.brainstorm_remarks.len(), 1);
        assert_eq!(t.brainstorm_remarks[0].persona, "Math Expert");
        assert_eq!(t.turns.len(), 4);
        assert_eq!(t.turns[0].persona, "AI Assistant (you)");
        assert_eq!(t.final_answer.as_deref(), Some("6 * (1 + 1) + 12 = 24"));
        assert!(!t.early_terminated);
        assert!(t.profiles.is_none());
    }

    #[test]
    fn stops_after_participants() {
        let t = parse_spp_transcript("Participants: AI Assistant (you); Expert").unwrap();
        assert_eq!(t.participants.len(), 2);
        assert!(t.early_terminated);
        assert!(t.final_answer.is_none());
        assert!(t.turns.is_empty());
    }

    #[test]
    fn missing_participants_is_failure() {
        assert_eq!(
            parse_spp_transcript("Final answer: 3"),
            Err(TranscriptError::NoParticipants)
        );
    }

    #[test]
    fn undeclared_speaker_is_reported() {
        let mutated = GAME_OF_24.replace("Math Expert: That is 36", "Narrator: That is 36");
        assert_eq!(
            parse_spp_transcript(&mutated),
            Err(TranscriptError::UnknownPersonas(vec!["Narrator".into()]))
        );
    }

    #[test]
    fn labels_match_case_insensitively() {
        let raw = GAME_OF_24.replace("Math Expert: Think", "math expert: Think").replace("AI Assistant (you): Thanks", "AI assistant: Thanks");
        let t = parse_spp_transcript(&raw).unwrap();
        assert_eq!(t.brainstorm_remarks[0].persona, "Math Expert");
        assert_eq!(t.turns[0].persona, "AI Assistant (you)");
    }

    #[test]
    fn multiline_turns_and_structural_labels() {
        let raw = "Participants: AI Assistant (you); Poet\n\nPoet: Seven lines.\n\
AI Assistant (you): Here's my attempt at the poem:\nTitle: Quantum\nCurious machine\nHarnessing ways\n\
Poet: Looks good.\n\nFinal answer:\nCurious machine\nHarnessing ways";
        let t = parse_spp_transcript(raw).unwrap();
        assert_eq!(t.turns.len(), 2);
        assert!(t.turns[0].text.contains("Title: Quantum\nCurious machine"));
        assert_eq!(t.final_answer.as_deref(), Some("Curious machine\nHarnessing ways"));
    }

    #[test]
    fn profile_lines() {
        let raw = "Participants:\n- AI Assistant (you) — profile: A helpful assistant.\n- Math Expert — profile: Good at arithmetic.\n\n\
AI Assistant (you): 4 * 6 = 24\nMath Expert: Correct.\n\nFinal answer: 4 * 6 = 24";
        let t = parse_spp_transcript(raw).unwrap();
        assert_eq!(t.participants, vec!["AI Assistant (you)", "Math Expert"]);
        let profiles = t.profiles.unwrap();
        assert_eq!(profiles["Math Expert"], "Good at arithmetic.");
        assert_eq!(profiles.len(), 2);
        assert!(t.brainstorm_remarks.is_empty());
    }

    #[test]
    fn earlier_markers_stay_in_the_dialogue() {
        let raw = "Participants: AI Assistant (you); Expert\nAI Assistant (you): Final answer: 2\nExpert: No, it is 3.\nFinal answer: 3";
        let t = parse_spp_transcript(raw).unwrap();
        assert_eq!(t.turns.len(), 2);
        assert_eq!(t.final_answer.as_deref(), Some("3"));
    }

    #[test]
    fn final_answer_inside_a_turn() {
        let raw = "Participants: AI Assistant (you); Expert\nExpert: ok\nAI Assistant (you): done. Final answer: 3";
        let t = parse_spp_transcript(raw).unwrap();
        assert_eq!(t.turns[0].text, "done.");
        assert_eq!(t.final_answer.as_deref(), Some("3"));
    }
}
