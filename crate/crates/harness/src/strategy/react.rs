//! Thought, action, observation.

use super::{Dialogue, StrategyOutcome, FINAL_REQUEST};
use crate::client::{ChatModel, QueryError};
use crate::extract::extract_answer;
use crate::prompt::PromptBundle;
use crate::tools::{find_tool_calls, observation};

const NO_ACTION: &str = "Observation: no action found. Reply with `Thought: ...` and then `Action: CALL ...` or `Action: Final Answer: X`.";

/// Each reply carries a thought and one action. A tool action is executed
/// and its observation appended; a final answer ends the loop. After
/// `max_steps` replies without a final answer one more is requested.
pub async fn strategy_react(
    model: &dyn ChatModel,
    bundle: &PromptBundle,
    num_options: usize,
    max_steps: usize,
) -> Result<StrategyOutcome, QueryError> {
    let mut d = Dialogue::new(model, bundle.messages());
    for _ in 0..max_steps {
        let reply = d.generate().await?;
        let action = reply.rsplit_once("Action:").map_or(reply.as_str(), |(_, a)| a);
        let calls = find_tool_calls(action);
        if let Some(call) = calls.first() {
            d.say(format!("Observation: {}", observation(call)));
        } else if extract_answer(action, num_options).is_ok() {
            return Ok(d.finish(reply, num_options));
        } else {
            d.say(NO_ACTION);
        }
    }
    d.say(FINAL_REQUEST);
    let reply = d.generate().await?;
    Ok(d.finish(reply, num_options))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prompt::{build_prompt, Strategy};
    use crate::strategy::scripted::Scripted;
    use deformbench::render::RenderStyle;
    use deformbench::taskgen::{assemble_question, Dimension, Direction, InputMode, TaskSpec};

    fn bundle() -> PromptBundle {
        let spec = TaskSpec::new(Dimension::TwoD, Direction::Forward, 1, InputMode::Encoded, 2);
        build_prompt(&assemble_question(&spec, &RenderStyle::default()).unwrap(), Strategy::React, None).unwrap()
    }

    #[tokio::test]
    async fn thought_tool_final() {
        let m = Scripted::new(&[
            "Thought: rotate first.\nAction: CALL apply_shape_actions(\"Su--Ry--\", \"rotate_cw\")",
            "Thought: that matches B.\nAction: Final Answer: B",
        ]);
        let out = strategy_react(&m, &bundle(), 4, 5).await.unwrap();
        assert_eq!((m.calls(), out.answer), (2, Some(1)));
        assert!(m.seen.lock().unwrap()[1].last().unwrap().joined_text().contains("--Su--Ry"));
    }

    #[tokio::test]
    async fn immediate_final_answer() {
        let m = Scripted::new(&["Thought: easy.\nAction: Final Answer: A"]);
        let out = strategy_react(&m, &bundle(), 4, 5).await.unwrap();
        assert_eq!((m.calls(), out.answer), (1, Some(0)));
    }

    #[tokio::test]
    async fn cap_forces_final_after_observations() {
        let step = "Thought: check.\nAction: CALL encode_shape(\"Cu------\")";
        let m = Scripted::new(&[step, step, step, "Answer: C"]);
        let out = strategy_react(&m, &bundle(), 4, 3).await.unwrap();
        assert_eq!(m.calls(), 4);
        let seen = m.seen.lock().unwrap();
        let observations = seen[3].iter().filter(|msg| msg.joined_text().starts_with("Observation:")).count();
        assert_eq!(observations, 3);
        assert_eq!(out.answer, Some(2));
    }
}
