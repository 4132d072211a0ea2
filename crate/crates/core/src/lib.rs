//! Instruction translation, low-level-action navigation and evaluation for
//! agricultural vision-and-language navigation.
//!
//! The crate is organised bottom-up:
//!
//! * [`types`] holds the shared domain types and the episode/result file formats.
//! * [`translator`] composes principle prompts and rewrites instructions.
//! * [`backend`] is the text-completion service boundary (HTTP, replay, scripted).
//! * [`env`] implements pose kinematics, deviation judgement and the episode loop.
//! * [`policy`] provides the decision policies (LLM, random, fixed, scripted).
//! * [`metrics`] computes navigation error, success rate and BERTScore F1.
//! * [`runner`] orchestrates benchmark grids and principle ablations.
//! * [`cli`] is the `ara` command-line front end.

// Aborts carry the partial trajectory by value; they are rare and not on a hot path.
#![allow(clippy::result_large_err)]
pub mod backend;
pub mod cli;
pub mod config;
pub mod env;
pub mod generate;
pub mod metrics;
pub mod policy;
pub mod runner;
pub mod tokenize;
pub mod translator;
pub mod types;

pub use types::{
    Action, Complexity, Episode, EpisodeResult, Goal, Instruction, InstructionOrigin, Pose,
    Termination,
};
