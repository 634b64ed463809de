//! Prompting strategies. Every strategy ends with one reply from which the
//! answer letter is read.

mod react;
mod reflection;
mod tool;

pub use react::strategy_react;
pub use reflection::{strategy_self_reflection, Critique, EngineVerifier, Verifier};
pub use tool::strategy_tool;

use std::time::Duration;

use deformbench::taskgen::Question;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::client::{ChatModel, QueryError};
use crate::extract::extract_answer;
use crate::prompt::{build_prompt, ChatMessage, PromptError, Role, Shot, Strategy};
use crate::wire::Usage;

pub const FINAL_REQUEST: &str = "Give your final answer now, without calling any tools.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyLimits {
    /// Verification rounds for self-reflection.
    pub max_iters: usize,
    /// Model turns for tool use and ReAct before a final answer is forced.
    pub max_steps: usize,
}

impl Default for StrategyLimits {
    fn default() -> Self {
        Self { max_iters: 3, max_steps: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallLog {
    pub text: String,
    pub usage: Option<Usage>,
    pub attempts: u32,
    #[serde(with = "millis")]
    pub latency: Duration,
}

mod millis {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_millis(u64::deserialize(d)?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyOutcome {
    /// Reply the answer was read from.
    pub final_text: String,
    /// `None` when the final reply holds no readable option letter.
    pub answer: Option<usize>,
    pub calls: Vec<CallLog>,
}

impl StrategyOutcome {
    pub fn usage(&self) -> Usage {
        self.calls.iter().filter_map(|c| c.usage).fold(Usage::default(), |a, u| Usage {
            prompt_tokens: a.prompt_tokens + u.prompt_tokens,
            completion_tokens: a.completion_tokens + u.completion_tokens,
        })
    }

    pub fn latency(&self) -> Duration {
        self.calls.iter().map(|c| c.latency).sum()
    }
}

#[derive(Debug, Error)]
pub enum StrategyError {
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Query(#[from] QueryError),
}

/// A running conversation that logs every model call.
pub(crate) struct Dialogue<'a> {
    model: &'a dyn ChatModel,
    pub messages: Vec<ChatMessage>,
    pub calls: Vec<CallLog>,
}

impl<'a> Dialogue<'a> {
    pub fn new(model: &'a dyn ChatModel, messages: Vec<ChatMessage>) -> Self {
        Self { model, messages, calls: Vec::new() }
    }

    /// Asks for the next assistant turn and appends it.
    pub async fn generate(&mut self) -> Result<String, QueryError> {
        let c = self.model.complete(&self.messages).await?;
        self.messages.push(ChatMessage::text(Role::Assistant, c.text.clone()));
        self.calls.push(CallLog { text: c.text.clone(), usage: c.usage, attempts: c.attempts, latency: c.latency });
        Ok(c.text)
    }

    pub fn say(&mut self, text: impl Into<String>) {
        self.messages.push(ChatMessage::text(Role::User, text));
    }

    pub fn finish(self, final_text: String, num_options: usize) -> StrategyOutcome {
        StrategyOutcome { answer: extract_answer(&final_text, num_options).ok(), final_text, calls: self.calls }
    }
}

/// Answers one question with the given strategy.
pub async fn run_strategy(
    model: &dyn ChatModel,
    question: &Question,
    strategy: Strategy,
    shot: Option<Shot>,
    limits: StrategyLimits,
) -> Result<StrategyOutcome, StrategyError> {
    let bundle = build_prompt(question, strategy, shot)?;
    let n = question.options.len();
    Ok(match strategy {
        Strategy::Vanilla | Strategy::Cot | Strategy::FewShot => {
            let mut d = Dialogue::new(model, bundle.messages());
            let reply = d.generate().await?;
            d.finish(reply, n)
        }
        Strategy::SelfReflection => {
            strategy_self_reflection(model, &bundle, &EngineVerifier(question), n, limits.max_iters).await?
        }
        Strategy::Tool => strategy_tool(model, &bundle, n, limits.max_steps).await?,
        Strategy::React => strategy_react(model, &bundle, n, limits.max_steps).await?,
    })
}

#[cfg(test)]
pub(crate) mod scripted {
    use std::sync::Mutex;

    use super::*;
    use crate::client::Completion;
    use async_trait::async_trait;

    /// Replies from a fixed script and records what it was sent.
    pub struct Scripted {
        replies: Mutex<Vec<String>>,
        pub seen: Mutex<Vec<Vec<ChatMessage>>>,
    }

    impl Scripted {
        pub fn new(replies: &[&str]) -> Self {
            Self {
                replies: Mutex::new(replies.iter().rev().map(|s| s.to_string()).collect()),
                seen: Mutex::new(Vec::new()),
            }
        }

        pub fn calls(&self) -> usize {
            self.seen.lock().unwrap().len()
        }
    }

    #[async_trait]
    impl ChatModel for Scripted {
        async fn complete(&self, messages: &[ChatMessage]) -> Result<Completion, QueryError> {
            self.seen.lock().unwrap().push(messages.to_vec());
            let text = self.replies.lock().unwrap().pop().expect("script exhausted");
            Ok(Completion { text, usage: None, attempts: 1, latency: Duration::ZERO })
        }
    }
}
