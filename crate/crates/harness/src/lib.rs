//! Evaluation harness: prompts, model clients, prompting strategies, the
//! engine-backed stub endpoint, multi-run evaluations and the ladder
//! session service.

pub mod client;
pub mod eval;
pub mod extract;
pub mod prompt;
pub mod serve;
pub mod strategy;
pub mod stub;
pub mod tools;
pub mod wire;
