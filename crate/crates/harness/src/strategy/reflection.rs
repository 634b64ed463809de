//! Validate, correct, validate.

use deformbench::taskgen::{option_letter, Candidate, Direction, Question};

use super::{Dialogue, StrategyOutcome};
use crate::client::{ChatModel, QueryError};
use crate::extract::extract_answer;
use crate::prompt::PromptBundle;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Critique {
    pub correct: bool,
    pub text: String,
}

pub trait Verifier: Sync {
    fn critique(&self, answer: Option<usize>) -> Critique;
}

/// Checks answers by running the engines on the chosen option.
pub struct EngineVerifier<'a>(pub &'a Question);

impl Verifier for EngineVerifier<'_> {
    fn critique(&self, answer: Option<usize>) -> Critique {
        let q = self.0;
        let Some(i) = answer else {
            return Critique {
                correct: false,
                text: "Verifier: no answer of the form `Answer: X` was found.".into(),
            };
        };
        let letter = option_letter(i);
        if q.option_is_correct(i).unwrap_or(false) {
            return Critique { correct: true, text: format!("Verifier: option {letter} is consistent.") };
        }
        let detail = match (&q.options[i], q.spec.direction) {
            (Candidate::Actions(a), Direction::Inverse) => match q.initial.apply(a, q.spec.dimension) {
                Ok(reached) => format!("its actions turn the initial state into\n{}\nwhich is not the target.", reached.encode()),
                Err(e) => format!("its actions cannot be applied: {e}."),
            },
            _ => "it is not the result of applying the actions to the initial state.".to_string(),
        };
        Critique { correct: false, text: format!("Verifier: option {letter} is wrong; {detail}") }
    }
}

/// Generates an answer, then alternates verification and correction.
/// `max_iters` bounds the number of verifications; a correction is only
/// requested when another verification will follow it.
pub async fn strategy_self_reflection(
    model: &dyn ChatModel,
    bundle: &PromptBundle,
    verifier: &dyn Verifier,
    num_options: usize,
    max_iters: usize,
) -> Result<StrategyOutcome, QueryError> {
    let mut d = Dialogue::new(model, bundle.messages());
    let mut reply = d.generate().await?;
    for i in 0..max_iters.max(1) {
        let critique = verifier.critique(extract_answer(&reply, num_options).ok());
        if critique.correct || i + 1 >= max_iters {
            break;
        }
        d.say(format!("{}\nRevise your answer and end with `Answer: X`.", critique.text));
        reply = d.generate().await?;
    }
    Ok(d.finish(reply, num_options))
}
