//! Inputs shared by the benchmarks.

use std::path::PathBuf;

use spp_core::tasks::{CodenamesInstance, Question, TriviaInstance};

pub fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

/// A ten-question trivia instance with three aliases each.
pub fn trivia_instance() -> TriviaInstance {
    let questions = (0..10)
        .map(|i| Question {
            text: format!("Question number {i}?"),
            answer_aliases: vec![format!("Answer {i}"), format!("alias-{i}"), format!("Third Form {i}")],
        })
        .collect();
    TriviaInstance { topic: "Benchmarks".into(), questions, n: 10 }
}

/// A story of roughly `words` words that mentions every other answer.
pub fn trivia_story(words: usize) -> String {
    let mut story = String::new();
    for i in 0..words {
        if i % 50 == 0 && (i / 50) % 2 == 0 {
            story.push_str(&format!("answer {} ", (i / 50) % 10));
        }
        story.push_str("lorem ");
    }
    story
}

pub fn codenames_instance() -> CodenamesInstance {
    let board: Vec<String> = [
        "apple", "river", "moon", "tiger", "piano", "cloud", "stone", "lamp", "orchard", "comet", "anchor", "violin",
        "ghost", "castle", "needle", "bridge", "honey", "glass", "forest", "engine", "crown", "shadow", "pepper", "wave",
    ]
    .iter()
    .map(|w| w.to_string())
    .collect();
    CodenamesInstance { target_words: board[..4].to_vec(), all_words: board }
}

/// A multi-persona transcript with `rounds` rounds of feedback among four personas.
pub fn transcript(rounds: usize) -> String {
    let mut t = String::from(
        "Participants: AI Assistant (you); Movie Expert; Game Expert; Music Expert\n\n\
         Movie Expert: The film came out in 2001.\nGame Expert: The princess is Zelda.\nMusic Expert: The album is Jay.\n\n",
    );
    for r in 0..rounds {
        t.push_str(&format!("AI Assistant (you): Draft {r}:\nIn 2001, Zelda listened to Jay.\n"));
        t.push_str("Movie Expert: Fine.\nGame Expert: Fine.\nMusic Expert: Fine.\n");
    }
    t.push_str("\nFinish collaboration!\n\nFinal answer: In 2001, Zelda listened to Jay.\n");
    t
}
