//! Adaptive ladder scoring.
//!
//! Level `R` means questions with `R` deformation steps. A round is five
//! questions; three correct promotes, anything less demotes by one and adds a
//! failure to the level just played. The run ends when the level drops to 0
//! or when a level collects its second failure. The level at that moment is
//! the score.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::render::RenderStyle;
use crate::rng::SeededRandom;
use crate::taskgen::{assemble_question, Dimension, Direction, InputMode, Question, TaskError, TaskSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LadderConfig {
    pub questions_per_level: u32,
    /// Minimum correct answers to pass a round.
    pub pass_threshold: u32,
    pub max_fails_per_level: u32,
    pub start_level: u32,
    /// Stop as soon as this level is reached; the score is then the cap.
    pub level_cap: Option<u32>,
    pub dimension: Dimension,
    pub direction: Direction,
    pub input_mode: InputMode,
    pub k: u32,
    pub r: u32,
}

impl Default for LadderConfig {
    fn default() -> Self {
        Self {
            questions_per_level: 5,
            pass_threshold: 3,
            max_fails_per_level: 2,
            start_level: 1,
            level_cap: None,
            dimension: Dimension::TwoD,
            direction: Direction::Forward,
            input_mode: InputMode::Encoded,
            k: TaskSpec::DEFAULT_K,
            r: TaskSpec::DEFAULT_R,
        }
    }
}

impl LadderConfig {
    pub fn validate(&self) -> Result<(), LadderError> {
        let bad = |m: String| Err(LadderError::InvalidConfig(m));
        if self.pass_threshold == 0 || self.pass_threshold > self.questions_per_level {
            return bad(format!(
                "pass threshold {} outside 1..={}",
                self.pass_threshold, self.questions_per_level
            ));
        }
        if self.max_fails_per_level == 0 || self.start_level == 0 {
            return bad("max fails and start level must be positive".into());
        }
        if self.level_cap.is_some_and(|cap| cap < self.start_level) {
            return bad("level cap below the start level".into());
        }
        Ok(())
    }

    /// Task for a level: `n` equals the level.
    pub fn spec_for(&self, level: u32, seed: u64) -> TaskSpec {
        TaskSpec {
            dimension: self.dimension,
            direction: self.direction,
            n: level,
            k: self.k,
            r: self.r.min(level),
            input_mode: self.input_mode,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transition {
    Promoted,
    Demoted,
    /// Dropped to level 0 or failed a level for the last allowed time.
    Terminated,
    /// Promoted onto the level cap.
    CapReached,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    /// 1-based.
    pub round: u32,
    pub level: u32,
    pub question_ids: Vec<String>,
    /// `None` marks an answer that could not be read.
    pub answers: Vec<Option<usize>>,
    pub correct: u32,
    pub transition: Transition,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LadderState {
    pub level: u32,
    pub fails: BTreeMap<u32, u32>,
    pub history: Vec<RoundRecord>,
    pub terminal: bool,
    pub capped: bool,
}

#[derive(Debug, Error)]
pub enum LadderError {
    #[error("the ladder run has already ended")]
    TerminalState,
    #[error("{correct} correct answers out of {questions}")]
    CountOutOfRange { correct: u32, questions: u32 },
    #[error("invalid ladder config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Task(#[from] TaskError),
}

impl LadderState {
    pub fn new(config: &LadderConfig) -> Self {
        Self {
            level: config.start_level,
            fails: BTreeMap::new(),
            history: Vec::new(),
            terminal: config.level_cap == Some(config.start_level),
            capped: config.level_cap == Some(config.start_level),
        }
    }

    /// The current level; final once the state is terminal.
    pub fn score(&self) -> u32 {
        self.level
    }

    pub fn rounds(&self) -> usize {
        self.history.len()
    }

    /// Specs for the next round. Seeds come from substream `("round", i)`
    /// of `rng`, so no question is ever reused within a run.
    pub fn next_batch(&self, config: &LadderConfig, rng: &SeededRandom) -> Result<Vec<TaskSpec>, LadderError> {
        if self.terminal {
            return Err(LadderError::TerminalState);
        }
        let mut seeds = rng.indexed("round", self.history.len() as u64);
        Ok((0..config.questions_per_level)
            .map(|_| config.spec_for(self.level, seeds.next_u64()))
            .collect())
    }

    /// Applies one round result and returns the transition taken.
    pub fn record_round(
        &mut self,
        config: &LadderConfig,
        correct: u32,
        question_ids: Vec<String>,
        answers: Vec<Option<usize>>,
    ) -> Result<Transition, LadderError> {
        if self.terminal {
            return Err(LadderError::TerminalState);
        }
        if correct > config.questions_per_level {
            return Err(LadderError::CountOutOfRange {
                correct,
                questions: config.questions_per_level,
            });
        }
        let played = self.level;
        let transition = if correct >= config.pass_threshold {
            self.level += 1;
            if config.level_cap == Some(self.level) {
                self.terminal = true;
                self.capped = true;
                Transition::CapReached
            } else {
                Transition::Promoted
            }
        } else {
            let f = self.fails.entry(played).or_insert(0);
            *f += 1;
            let out_of_fails = *f >= config.max_fails_per_level;
            self.level -= 1;
            if out_of_fails || self.level == 0 {
                self.terminal = true;
                Transition::Terminated
            } else {
                Transition::Demoted
            }
        };
        self.history.push(RoundRecord {
            round: self.history.len() as u32 + 1,
            level: played,
            question_ids,
            answers,
            correct,
            transition,
        });
        Ok(transition)
    }
}

/// Something that picks an option for a question. `Ok(None)` is an
/// unreadable answer and counts as wrong.
pub trait Agent {
    type Error;
    fn answer(&mut self, question: &Question) -> Result<Option<usize>, Self::Error>;
}

/// Always picks the gold option.
pub struct OracleAgent;

impl Agent for OracleAgent {
    type Error = std::convert::Infallible;
    fn answer(&mut self, q: &Question) -> Result<Option<usize>, Self::Error> {
        Ok(Some(q.gt_index))
    }
}

/// Always picks a wrong option.
pub struct WrongAgent;

impl Agent for WrongAgent {
    type Error = std::convert::Infallible;
    fn answer(&mut self, q: &Question) -> Result<Option<usize>, Self::Error> {
        Ok(Some((q.gt_index + 1) % q.options.len()))
    }
}

/// Always picks the same slot.
pub struct FixedAgent(pub usize);

impl Agent for FixedAgent {
    type Error = std::convert::Infallible;
    fn answer(&mut self, _: &Question) -> Result<Option<usize>, Self::Error> {
        Ok(Some(self.0))
    }
}

/// Uniform guess over the options.
pub struct RandomAgent(pub SeededRandom);

impl Agent for RandomAgent {
    type Error = std::convert::Infallible;
    fn answer(&mut self, q: &Question) -> Result<Option<usize>, Self::Error> {
        Ok(Some(self.0.index(q.options.len())))
    }
}

/// Correct with probability `p`, otherwise a uniformly drawn wrong option.
pub struct BernoulliAgent {
    pub p: f64,
    pub rng: SeededRandom,
}

impl Agent for BernoulliAgent {
    type Error = std::convert::Infallible;
    fn answer(&mut self, q: &Question) -> Result<Option<usize>, Self::Error> {
        if self.rng.chance(self.p) {
            return Ok(Some(q.gt_index));
        }
        let wrong = self.rng.index(q.options.len() - 1);
        Ok(Some(if wrong >= q.gt_index { wrong + 1 } else { wrong }))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LadderRun {
    pub score: u32,
    pub state: LadderState,
}

#[derive(Debug, Error)]
pub enum RunError<E> {
    #[error("agent failed after {} rounds", partial.history.len())]
    Agent { error: E, partial: Box<LadderState> },
    #[error(transparent)]
    Ladder(#[from] LadderError),
}

/// Plays rounds until the state is terminal.
pub fn run_ladder<A: Agent>(
    agent: &mut A,
    config: &LadderConfig,
    rng: &SeededRandom,
    style: &RenderStyle,
) -> Result<LadderRun, RunError<A::Error>> {
    config.validate()?;
    let mut state = LadderState::new(config);
    while !state.terminal {
        let specs = state.next_batch(config, rng)?;
        let mut ids = Vec::with_capacity(specs.len());
        let mut answers = Vec::with_capacity(specs.len());
        let mut correct = 0;
        for spec in &specs {
            let q = assemble_question(spec, style).map_err(LadderError::from)?;
            let a = match agent.answer(&q) {
                Ok(a) => a,
                Err(error) => return Err(RunError::Agent { error, partial: Box::new(state) }),
            };
            correct += u32::from(a == Some(q.gt_index));
            ids.push(q.id);
            answers.push(a);
        }
        state.record_round(config, correct, ids, answers)?;
    }
    Ok(LadderRun { score: state.score(), state })
}
