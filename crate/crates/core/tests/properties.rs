mod common;

use proptest::prelude::*;

use ara_nav::generate::{generate_episodes, GenerateOptions};
use ara_nav::metrics::{bertscore_f1, instruction_similarity, navigation_error, Embedder, HashEmbedder};
use ara_nav::translator::{desk_rewrite, desk_translate, PrincipleId, PrincipleSet};
use ara_nav::types::{parse_episode_file, write_episode_file};
use ara_nav::{Complexity, Goal, Instruction, Pose};

use common::*;

fn words() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec("[a-z]{1,6}", 1..10)
}

proptest! {
    #[test]
    fn ne_symmetric_and_nonnegative(ax in -1e3..1e3f64, ay in -1e3..1e3f64, bx in -1e3..1e3f64, by in -1e3..1e3f64) {
        let ab = navigation_error(&Pose::new(ax, ay, 0.0), &Goal { x: bx, y: by });
        let ba = navigation_error(&Pose::new(bx, by, 0.0), &Goal { x: ax, y: ay });
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(ab, ba);
        prop_assert_eq!(ab == 0.0, ax == bx && ay == by);
    }

    #[test]
    fn bertscore_self_match_and_symmetry(a in words(), b in words(), seed in 0u64..1000) {
        let e = HashEmbedder::new(16, seed);
        let self_score = bertscore_f1(&a, &a, &e).unwrap().f1;
        prop_assert!((self_score - 1.0).abs() < 1e-12, "{}", self_score);
        let ab = bertscore_f1(&a, &b, &e).unwrap();
        let ba = bertscore_f1(&b, &a, &e).unwrap();
        prop_assert!((ab.f1 - ba.f1).abs() < 1e-12);
        prop_assert!((ab.precision - ba.recall).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&ab.f1));
    }

    #[test]
    fn hash_vectors_are_unit_and_stable(tokens in words(), dim in 1usize..80) {
        let e = HashEmbedder::new(dim, 5);
        let v = e.embed(&tokens);
        prop_assert_eq!(v.len(), tokens.len());
        for (t, x) in tokens.iter().zip(&v) {
            let norm = x.iter().map(|c| c * c).sum::<f64>().sqrt();
            prop_assert!((norm - 1.0).abs() < 1e-6);
            prop_assert_eq!(x, &e.embed_token(t));
        }
    }

    #[test]
    fn episode_files_round_trip(seed in 0u64..500, n in 1usize..12) {
        let eps = generate_episodes(&GenerateOptions { n, seed, kinematics: Default::default() });
        let bytes = write_episode_file(&eps);
        prop_assert_eq!(parse_episode_file(&bytes).unwrap(), eps);
    }

    #[test]
    fn empty_principle_set_is_identity(text in "[ -~]{1,60}") {
        prop_assert_eq!(desk_rewrite(&text, &PrincipleSet::empty()).text, text);
    }

    #[test]
    fn desk_output_is_never_blank(text in "[a-zA-Z ,.]{0,40}[a-z]") {
        let i = Instruction::original(&text).unwrap();
        let t = desk_translate(&i, &PrincipleSet::all());
        prop_assert!(!t.translated.text().trim().is_empty());
        prop_assert!(t.translated.is_translated());
    }
}

#[test]
fn disjoint_tokens_score_below_one() {
    let e = HashEmbedder::default();
    let a: Vec<String> = ["go", "to", "the", "shed"].map(String::from).to_vec();
    let b: Vec<String> = ["rotate", "left", "ninety", "degrees"].map(String::from).to_vec();
    let s = bertscore_f1(&a, &b, &e).unwrap().f1;
    assert!(s < 1.0, "{s}");
    assert_eq!(bertscore_f1(&a, &a, &e).unwrap().f1, 1.0);
    assert!(bertscore_f1(&[], &a, &e).is_err());
}

#[test]
fn complexity_partitions_the_corpus() {
    let eps = synthetic20();
    for e in &eps {
        let c = e.complexity();
        assert_eq!(c == Complexity::High, e.subtask_count() >= 3);
    }
}

fn corpus() -> Vec<String> {
    let mut c: Vec<String> = synthetic20().iter().map(|e| e.instruction().text().to_string()).collect();
    c.push(FIG1.to_string());
    c
}

fn mean_similarity(corpus: &[String], set: &PrincipleSet, e: &HashEmbedder) -> f64 {
    corpus
        .iter()
        .map(|t| {
            let out = desk_translate(&Instruction::original(t).unwrap(), set);
            instruction_similarity(t, out.translated.text(), e).unwrap()
        })
        .sum::<f64>()
        / corpus.len() as f64
}

/// More rewrite rules never raise the corpus-mean similarity: checked for
/// every subset and every principle added to it.
#[test]
fn adding_rules_never_raises_corpus_similarity() {
    let e = HashEmbedder::default();
    let corpus = corpus();
    for mask in 0u32..32 {
        let ids: Vec<PrincipleId> = PrincipleId::ALL.into_iter().filter(|p| mask & (1 << *p as u32) != 0).collect();
        let base = PrincipleSet::new(ids.clone()).unwrap();
        let s = mean_similarity(&corpus, &base, &e);
        for p in PrincipleId::ALL.into_iter().filter(|p| !ids.contains(p)) {
            let mut more = ids.clone();
            more.push(p);
            let m = mean_similarity(&corpus, &PrincipleSet::new(more).unwrap(), &e);
            assert!(m <= s + 1e-12, "{:?} + {p}: {m} > {s}", ids);
        }
    }
}
