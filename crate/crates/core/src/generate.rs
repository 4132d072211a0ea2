//! Seeded synthetic episodes: geometrically consistent label paths with
//! spoken-style noisy instructions. The goal is always the final position of
//! the label rollout.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::env::{rollout, KinematicsConfig};
use crate::types::{Action, Episode, Goal, Instruction, Pose};

const TARGETS: &[(&str, &str)] = &[
    ("that girl in blue shirt", "her"),
    ("the worker with a red hat", "him"),
    ("the water tank", "it"),
    ("the pepper plants", "them"),
    ("the greenhouse door", "it"),
    ("the strawberry rows", "them"),
    ("the tomato trellis", "it"),
    ("that man near the cart", "him"),
];

const FILLERS: &[&str] = &["em, ", "uh, ", "well, ", "okay so ", "you know, ", ""];

// Misspellings the desk translator knows how to revise.
const TYPOS: &[(&str, &str)] = &[
    ("right", "rigth"),
    ("left", "lfet"),
    ("ahead", "ahaed"),
    ("turn", "trun"),
    ("until", "untill"),
    ("stop", "stpo"),
    ("greenhouse", "greenhose"),
    ("plants", "plnats"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct GenerateOptions {
    pub n: usize,
    pub seed: u64,
    pub kinematics: KinematicsConfig,
}

struct Subtask {
    turn: Option<(Action, usize)>,
    forward: usize,
    target: (&'static str, &'static str),
}

fn turn_phrase(action: Action, count: usize) -> String {
    let dir = if action == Action::LeftRotate { "left" } else { "right" };
    match count {
        1 => format!("turn slightly {dir}"),
        3 => format!("turn {dir}"),
        6 => "turn around".to_string(),
        _ => format!("turn {dir} a bit"),
    }
}

fn sentence(rng: &mut ChaCha8Rng, sub: &Subtask, first: bool) -> String {
    let filler = *FILLERS.choose(rng).unwrap();
    let (object, pronoun) = sub.target;
    let mut s = String::from(filler);
    if !first {
        s.push_str(["then ", "after that ", "and "].choose(rng).unwrap());
    }
    if let Some((a, c)) = sub.turn {
        s.push_str(&turn_phrase(a, c));
        s.push_str(", ");
    }
    match rng.random_range(0..3) {
        0 => s.push_str(&format!("go ahead to {object} and stop when you are close to {pronoun}")),
        1 => s.push_str(&format!("walk a few steps toward {object}, get close to {pronoun}")),
        _ => s.push_str(&format!("move forward until you are near {object}")),
    }
    s
}

fn add_typos(rng: &mut ChaCha8Rng, text: &str) -> String {
    text.split(' ')
        .map(|w| {
            let bare = w.trim_end_matches(',');
            match TYPOS.iter().find(|(good, _)| *good == bare) {
                Some((_, bad)) if rng.random_bool(0.3) => w.replacen(bare, bad, 1),
                _ => w.to_string(),
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Generates `n` episodes; even indices get two subtasks and odd indices
/// three, so the LOW/HIGH split is as balanced as `n` allows.
pub fn generate_episodes(opts: &GenerateOptions) -> Vec<Episode> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    (0..opts.n)
        .map(|i| {
            let subtask_count = if i % 2 == 0 { 2 } else { 3 };
            let subs: Vec<Subtask> = (0..subtask_count)
                .map(|k| {
                    let turn = (k > 0 || rng.random_bool(0.5)).then(|| {
                        let a = if rng.random_bool(0.5) { Action::LeftRotate } else { Action::RightRotate };
                        (a, *[1usize, 2, 3, 6].choose(&mut rng).unwrap())
                    });
                    Subtask {
                        turn,
                        forward: rng.random_range(2..=6),
                        target: *TARGETS.choose(&mut rng).unwrap(),
                    }
                })
                .collect();
            let mut label = Vec::new();
            for s in &subs {
                if let Some((a, c)) = s.turn {
                    label.extend(std::iter::repeat_n(a, c));
                }
                label.extend(std::iter::repeat_n(Action::Forward, s.forward));
            }
            label.push(Action::Stop);
            let text: Vec<String> = subs
                .iter()
                .enumerate()
                .map(|(k, s)| sentence(&mut rng, s, k == 0))
                .collect();
            let mut text = add_typos(&mut rng, &text.join(". "));
            text.push('.');
            if let Some(c) = text.get(..1) {
                let upper = c.to_uppercase();
                text.replace_range(..1, &upper);
            }
            let start = Pose::new(
                f64::from(rng.random_range(-10i32..=10)) * 0.5,
                f64::from(rng.random_range(-10i32..=10)) * 0.5,
                f64::from(rng.random_range(0u32..12)) * 30.0,
            );
            let end = rollout(start, &label, &opts.kinematics).last();
            let id = format!("syn-{:03}", i + 1);
            let frames = (0..label.len()).map(|t| format!("frames/{id}/{t:03}.jpg")).collect();
            Episode::new(
                id,
                Instruction::original(text).expect("generated text is non-empty"),
                start,
                Goal { x: end.x, y: end.y },
                label,
                subtask_count,
                frames,
            )
            .expect("generated episodes satisfy the invariants")
        })
        .collect()
}
