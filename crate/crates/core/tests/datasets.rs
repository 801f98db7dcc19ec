use std::io::Write;
use std::path::PathBuf;

use proptest::prelude::*;
use spp_core::model::{TaskKind, TaskPayload};
use spp_core::tasks::{
    load_dataset, render_trivia_task, scan_dataset, score_codenames_answer, score_trivia, shuffle_questions,
    CodenamesInstance, DatasetError, Question, TriviaInstance,
};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/datasets").join(name)
}

fn trivia_line(id: usize) -> String {
    let questions: Vec<String> = (0..5)
        .map(|q| format!(r#"{{"text":"Question {q}?","answer_aliases":["answer {id}-{q}"]}}"#))
        .collect();
    format!(
        r#"{{"id":"t{id:03}","kind":"trivia_creative_writing","payload":{{"topic":"Topic {id}","questions":[{}],"n":5}}}}"#,
        questions.join(",")
    )
}

fn write(lines: &[String]) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    for l in lines {
        writeln!(f, "{l}").unwrap();
    }
    f
}

#[test]
fn hundred_trivia_lines() {
    let f = write(&(0..100).map(trivia_line).collect::<Vec<_>>());
    let instances = load_dataset(f.path(), TaskKind::TriviaCreativeWriting, Some(100)).unwrap();
    assert_eq!(instances.len(), 100);
}

#[test]
fn empty_file_count_mismatch() {
    let f = write(&[]);
    let err = load_dataset(f.path(), TaskKind::CodenamesCollaborative, Some(50)).unwrap_err();
    assert!(matches!(err, DatasetError::CountMismatch { expected: 50, found: 0 }));
}

#[test]
fn missing_aliases_named() {
    let line = trivia_line(1).replacen(r#","answer_aliases":["answer 1-0"]"#, "", 1);
    let f = write(&[trivia_line(0), line]);
    let err = load_dataset(f.path(), TaskKind::TriviaCreativeWriting, None).unwrap_err().to_string();
    assert!(err.contains("line 2") && err.contains("answer_aliases"), "{err}");
}

#[test]
fn truncated_line_and_duplicates() {
    let mut truncated = trivia_line(2);
    truncated.truncate(40);
    let f = write(&[trivia_line(0), trivia_line(1), truncated, trivia_line(0)]);
    let scan = scan_dataset(f.path(), TaskKind::TriviaCreativeWriting).unwrap();
    let lines: Vec<usize> = scan.issues.iter().map(|i| i.line).collect();
    assert_eq!(lines, [3, 4]);
    assert!(scan.issues[1].message.contains("line 1"));
}

#[test]
fn bundled_fixtures_are_valid() {
    for (file, kind, count) in [
        ("trivia_creative_writing_n5.jsonl", TaskKind::TriviaCreativeWriting, 5),
        ("trivia_creative_writing_n10.jsonl", TaskKind::TriviaCreativeWriting, 2),
        ("codenames_collaborative.jsonl", TaskKind::CodenamesCollaborative, 50),
        ("logic_grid_puzzle.jsonl", TaskKind::LogicGridPuzzle, 5),
    ] {
        load_dataset(&fixture(file), kind, Some(count)).unwrap_or_else(|e| panic!("{file}: {e}"));
    }
}

#[test]
fn harry_potter_instance_renders() {
    let instances = load_dataset(&fixture("trivia_creative_writing_n5.jsonl"), TaskKind::TriviaCreativeWriting, None).unwrap();
    let TaskPayload::Trivia(hp) = &instances[0].payload else { panic!("trivia payload") };
    let text = render_trivia_task(hp);
    assert!(text.contains("about Harry Potter"));
    assert_eq!(text.lines().filter(|l| l.starts_with(char::is_numeric)).count(), 5);
}

fn trivia(aliases: &[Vec<String>]) -> TriviaInstance {
    TriviaInstance {
        topic: "t".into(),
        questions: aliases.iter().map(|a| Question { text: "q".into(), answer_aliases: a.clone() }).collect(),
        n: aliases.len(),
    }
}

proptest! {
    #[test]
    fn trivia_monotone(aliases in prop::collection::vec(prop::collection::vec("[a-z]{3,6}", 1..3), 1..6), base in "[a-z ]{0,30}", pick in any::<prop::sample::Index>()) {
        let inst = trivia(&aliases);
        let before = score_trivia(&base, &inst);
        let i = pick.index(aliases.len());
        let after = score_trivia(&format!("{base} {}", aliases[i][0]), &inst);
        prop_assert!(after >= before);
        let was_matched = score_trivia(&base, &trivia(&aliases[i..=i])) == 1.0;
        if !was_matched {
            // The appended alias can also complete aliases of other questions.
            prop_assert!(after >= before + 1.0 / inst.n as f64 - 1e-12);
        }
        prop_assert!((0.0..=1.0).contains(&after));
    }

    #[test]
    fn trivia_alias_order_and_case(aliases in prop::collection::vec(prop::collection::vec("[a-z]{2,5}", 1..4), 1..5), story in "[a-zA-Z ]{0,40}") {
        let inst = trivia(&aliases);
        let reversed = trivia(&aliases.iter().map(|a| a.iter().rev().cloned().collect()).collect::<Vec<_>>());
        let s = score_trivia(&story, &inst);
        prop_assert_eq!(s, score_trivia(&story, &reversed));
        prop_assert_eq!(s, score_trivia(&story.to_uppercase(), &inst));
    }

    #[test]
    fn codenames_superset_scores_one(words in prop::collection::btree_set("[a-z]{3,6}", 2..10), extra in prop::collection::vec("[a-z]{3,6}", 0..4)) {
        let words: Vec<String> = words.into_iter().collect();
        let targets = words[..words.len() / 2 + 1].to_vec();
        let inst = CodenamesInstance { target_words: targets.clone(), all_words: words.clone() };
        let answer = targets.iter().chain(&extra).cloned().collect::<Vec<_>>().join(", ");
        prop_assert_eq!(score_codenames_answer(Some(&answer), &inst).score, 1.0);
    }

    #[test]
    fn shuffle_keeps_gold(seed in any::<u64>()) {
        let inst = load_dataset(&fixture("trivia_creative_writing_n5.jsonl"), TaskKind::TriviaCreativeWriting, None).unwrap();
        let TaskPayload::Trivia(hp) = &inst[0].payload else { unreachable!() };
        let shuffled = shuffle_questions(hp, seed);
        let mut a: Vec<_> = hp.questions.iter().map(|q| q.text.clone()).collect();
        let mut b: Vec<_> = shuffled.questions.iter().map(|q| q.text.clone()).collect();
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
        let story = "David Seville walked down Sunset Boulevard in exile.";
        prop_assert_eq!(score_trivia(story, hp), score_trivia(story, &shuffled));
    }
}
