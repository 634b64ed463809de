//! Prompt assembly. A [`PromptBundle`] fixes the request bytes for a
//! question under one prompting strategy.

use std::fmt;
use std::str::FromStr;

use deformbench::render::RenderStyle;
use deformbench::rng::derive_seed;
use deformbench::taskgen::{
    assemble_question, options_block, rules_text, worked_solution, AssetRole, Direction, InputMode, Question,
    TaskError, TaskSpec, ANSWER_INSTRUCTION, SECTION_ACTIONS,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tools::TOOL_GUIDE;

pub const COT_PHRASE: &str = "Let's think step by step.";

/// Marks the message that carries the question to answer.
pub const QUESTION_MARKER: &str = "[question]";
pub const TASK_SECTION: &str = "[task]";
pub const IMAGES_SECTION: &str = "[images]";
/// Everything after this header is guidance, not task data.
pub const INSTRUCTIONS_SECTION: &str = "[instructions]";

pub const REACT_GUIDE: &str = "\
Structure every reply as a line `Thought: ...` followed by a line `Action: ...`. \
The action is either one tool call or `Final Answer: X`.";

const SYSTEM_TEXT: &str = "You are solving spatial deformation puzzles. Each question has exactly one correct option.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Vanilla,
    Cot,
    FewShot,
    SelfReflection,
    Tool,
    React,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::Vanilla,
        Strategy::Cot,
        Strategy::FewShot,
        Strategy::SelfReflection,
        Strategy::Tool,
        Strategy::React,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Strategy::Vanilla => "vanilla",
            Strategy::Cot => "cot",
            Strategy::FewShot => "few_shot",
            Strategy::SelfReflection => "self_reflection",
            Strategy::Tool => "tool",
            Strategy::React => "react",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.label())
    }
}

impl FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let norm = s.to_ascii_lowercase().replace('-', "_");
        Strategy::ALL
            .into_iter()
            .find(|st| st.label() == norm)
            .ok_or_else(|| format!("unknown strategy `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Text(String),
    /// SVG document, sent base64-embedded.
    Svg(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub parts: Vec<Part>,
}

impl ChatMessage {
    pub fn text(role: Role, text: impl Into<String>) -> Self {
        Self { role, parts: vec![Part::Text(text.into())] }
    }

    pub fn joined_text(&self) -> String {
        self.parts
            .iter()
            .filter_map(|p| match p {
                Part::Text(t) => Some(t.as_str()),
                Part::Svg(_) => None,
            })
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn images(&self) -> impl Iterator<Item = &str> {
        self.parts.iter().filter_map(|p| match p {
            Part::Svg(s) => Some(s.as_str()),
            Part::Text(_) => None,
        })
    }
}

/// A question laid out for a model: images first, then text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionBlock {
    pub images: Vec<String>,
    pub text: String,
}

impl QuestionBlock {
    pub fn new(q: &Question) -> Self {
        let spec = &q.spec;
        let mut text = format!("{QUESTION_MARKER}\n{TASK_SECTION}\n{} {}\n", spec.dimension, spec.direction);
        let mut images = Vec::new();
        match spec.input_mode {
            InputMode::Encoded => {
                text.push_str(&q.stem_encoding());
                text.push('\n');
                text.push_str(&options_block(&q.option_encodings()));
            }
            InputMode::Image => {
                let svg = |role| q.asset(role).expect("image questions carry their assets").svg.clone();
                images.push(svg(AssetRole::Initial));
                text.push_str(&format!("{IMAGES_SECTION}\nImage 1 shows the initial state.\n"));
                match spec.direction {
                    Direction::Forward => {
                        images.push(svg(AssetRole::OptionSheet));
                        text.push_str("Image 2 shows the options, each labeled with its letter.\n");
                        text.push_str(&format!("{SECTION_ACTIONS}\n{}", q.target_actions.encode()));
                    }
                    Direction::Inverse => {
                        images.push(svg(AssetRole::Target));
                        text.push_str("Image 2 shows the target state.\n");
                        text.push_str(&options_block(&q.option_encodings()));
                    }
                }
            }
        }
        Self { images, text }
    }

    fn message(&self, extra: &[&str]) -> ChatMessage {
        let mut parts: Vec<Part> = self.images.iter().cloned().map(Part::Svg).collect();
        let mut text = self.text.clone();
        if !extra.is_empty() {
            text.push_str(&format!("\n\n{INSTRUCTIONS_SECTION}\n{}", extra.join("\n")));
        }
        parts.push(Part::Text(text));
        ChatMessage { role: Role::User, parts }
    }
}

/// A solved example shown before the question.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shot {
    pub block: QuestionBlock,
    pub solution: String,
}

impl Shot {
    pub fn from_question(q: &Question) -> Self {
        Self { block: QuestionBlock::new(q), solution: worked_solution(q) }
    }
}

/// The example for `spec`: same task and difficulty, drawn from a seed
/// namespace evaluation questions never use.
pub fn make_shot(spec: &TaskSpec, style: &RenderStyle) -> Result<Shot, TaskError> {
    let shot_spec = TaskSpec { seed: derive_seed(spec.seed, "few-shot"), ..*spec };
    Ok(Shot::from_question(&assemble_question(&shot_spec, style)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub system: String,
    pub task: String,
    pub shot: Option<Shot>,
    pub question: QuestionBlock,
    pub strategy: Strategy,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PromptError {
    #[error("the few-shot strategy needs an example")]
    MissingShots,
    #[error("only the few-shot strategy takes an example")]
    UnexpectedShots,
}

pub fn build_prompt(question: &Question, strategy: Strategy, shot: Option<Shot>) -> Result<PromptBundle, PromptError> {
    match (strategy, &shot) {
        (Strategy::FewShot, None) => return Err(PromptError::MissingShots),
        (Strategy::FewShot, Some(_)) | (_, None) => {}
        (_, Some(_)) => return Err(PromptError::UnexpectedShots),
    }
    Ok(PromptBundle {
        system: SYSTEM_TEXT.to_string(),
        task: rules_text(question.spec.dimension, question.spec.direction),
        shot,
        question: QuestionBlock::new(question),
        strategy,
    })
}

impl PromptBundle {
    /// Opening conversation: system rules, the optional example exchange,
    /// then the question with any strategy decoration.
    pub fn messages(&self) -> Vec<ChatMessage> {
        let mut out = vec![ChatMessage::text(Role::System, format!("{}\n\n{}", self.system, self.task))];
        if let Some(shot) = &self.shot {
            let mut example = shot.block.message(&[ANSWER_INSTRUCTION]);
            if let Some(Part::Text(t)) = example.parts.last_mut() {
                *t = format!("Example:\n{t}").replacen(QUESTION_MARKER, "[example]", 1);
            }
            out.push(example);
            out.push(ChatMessage::text(Role::Assistant, shot.solution.clone()));
        }
        let extra: Vec<&str> = match self.strategy {
            Strategy::Cot => vec![ANSWER_INSTRUCTION, COT_PHRASE],
            Strategy::Tool => vec![ANSWER_INSTRUCTION, TOOL_GUIDE],
            Strategy::React => vec![ANSWER_INSTRUCTION, TOOL_GUIDE, REACT_GUIDE],
            _ => vec![ANSWER_INSTRUCTION],
        };
        out.push(self.question.message(&extra));
        out
    }

    pub fn image_count(&self) -> usize {
        self.messages().iter().map(|m| m.images().count()).sum()
    }
}
