//! Trivia Creative Writing: write one story that mentions the answers to N trivia questions.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::text::normalize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Question {
    pub text: String,
    /// Accepted surface forms; a mention of any one counts the question correct.
    pub answer_aliases: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriviaInstance {
    pub topic: String,
    pub questions: Vec<Question>,
    pub n: usize,
}

/// Renders the story-writing request, numbering questions in stored order.
pub fn render_trivia_task(instance: &TriviaInstance) -> String {
    let mut text = format!(
        "Write a short and coherent story about {} that incorporates the answers to the following {} questions:",
        instance.topic.trim(),
        instance.questions.len()
    );
    for (i, question) in instance.questions.iter().enumerate() {
        text.push_str(&format!("\n{}. {}", i + 1, question.text.trim()));
    }
    text
}

/// Returns a copy with the questions permuted by a ChaCha8 stream seeded with `seed`.
pub fn shuffle_questions(instance: &TriviaInstance, seed: u64) -> TriviaInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shuffled = instance.clone();
    shuffled.questions.shuffle(&mut rng);
    shuffled
}

/// Fraction of questions with at least one alias mentioned in `generation`.
///
/// Both sides are normalized (NFKC, case fold, whitespace collapse) and an alias
/// matches by substring containment. A question counts at most once.
pub fn score_trivia(generation: &str, instance: &TriviaInstance) -> f64 {
    if instance.n == 0 {
        return 0.0;
    }
    let haystack = normalize(generation);
    let correct = instance
        .questions
        .iter()
        .filter(|question| {
            question.answer_aliases.iter().any(|alias| {
                let needle = normalize(alias);
                !needle.is_empty() && haystack.contains(&needle)
            })
        })
        .count();
    correct as f64 / instance.n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(text: &str, aliases: &[&str]) -> Question {
        Question {
            text: text.into(),
            answer_aliases: aliases.iter().map(|a| a.to_string()).collect(),
        }
    }

    fn five() -> TriviaInstance {
        TriviaInstance {
            topic: "Harry Potter".into(),
            questions: vec![
                q("Who was the man behind The Chipmunks?", &["David Seville", "Ross Bagdasarian"]),
                q(
                    "Which Lloyd Webber musical premiered in the US on 10th December 1993?",
                    &["Sunset Boulevard"],
                ),
                q(
                    "Who was the next British Prime Minister after Arthur Balfour?",
                    &["Henry Campbell-Bannerman", "Campbell-Bannerman"],
                ),
                q("Who had a 70s No 1 hit with Kiss You All Over?", &["Exile"]),
                q("What claimed the life of singer Kathleen Ferrier?", &["Cancer", "breast cancer"]),
            ],
            n: 5,
        }
    }

    #[test]
    fn three_of_five() {
        let story = "Harry hummed a David Seville tune on Sunset Boulevard while reading about Campbell-Bannerman.";
        assert_eq!(score_trivia(story, &five()), 0.6);
    }

    #[test]
    fn empty_generation_scores_zero() {
        assert_eq!(score_trivia("", &five()), 0.0);
    }

    #[test]
    fn question_counts_once() {
        let story = "breast cancer, cancer, CANCER";
        assert_eq!(score_trivia(story, &five()), 0.2);
    }

    #[test]
    fn render_lists_numbered_questions_in_order() {
        let text = render_trivia_task(&five());
        assert!(text.starts_with("Write a short and coherent story about Harry Potter"));
        assert!(text.contains("following 5 questions"));
        for i in 1..=5 {
            assert!(text.contains(&format!("\n{i}. ")));
        }
        assert!(!text.contains("\n6. "));
        assert!(text.find("Chipmunks").unwrap() < text.find("Kathleen").unwrap());
    }

    #[test]
    fn shuffle_is_deterministic_permutation() {
        let inst = five();
        let a = shuffle_questions(&inst, 7);
        let b = shuffle_questions(&inst, 7);
        assert_eq!(a, b);
        let mut orig: Vec<_> = inst.questions.iter().map(|q| q.text.clone()).collect();
        let mut perm: Vec<_> = a.questions.iter().map(|q| q.text.clone()).collect();
        orig.sort();
        perm.sort();
        assert_eq!(orig, perm);
    }

    #[test]
    fn shuffle_of_single_question_is_identity() {
        let mut inst = five();
        inst.questions.truncate(1);
        inst.n = 1;
        assert_eq!(shuffle_questions(&inst, 12345), inst);
    }

    #[test]
    fn some_seed_yields_identity_order() {
        let mut inst = five();
        inst.questions.truncate(3);
        inst.n = 3;
        let seed = (0..10_000u64)
            .find(|s| shuffle_questions(&inst, *s) == inst)
            .expect("a 3-element shuffle hits the identity within 10k seeds");
        assert_eq!(shuffle_questions(&inst, seed).questions, inst.questions);
    }

    #[test]
    fn shuffled_prompt_changes_but_gold_does_not() {
        let inst = five();
        let seed = (0..100u64)
            .find(|s| shuffle_questions(&inst, *s).questions != inst.questions)
            .unwrap();
        let shuffled = shuffle_questions(&inst, seed);
        assert_ne!(render_trivia_task(&inst), render_trivia_task(&shuffled));
        let story = "David Seville met Exile at Sunset Boulevard";
        assert_eq!(score_trivia(story, &inst), score_trivia(story, &shuffled));
    }
}
