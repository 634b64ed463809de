//! Alternating model and tool turns.

use super::{Dialogue, StrategyOutcome, FINAL_REQUEST};
use crate::client::{ChatModel, QueryError};
use crate::prompt::PromptBundle;
use crate::tools::{find_tool_calls, observation};

/// Runs tool calls found in each reply and feeds the results back. Returns
/// on the first reply without a call; after `max_steps` replies that all
/// called tools, one more reply is requested without tools.
pub async fn strategy_tool(
    model: &dyn ChatModel,
    bundle: &PromptBundle,
    num_options: usize,
    max_steps: usize,
) -> Result<StrategyOutcome, QueryError> {
    let mut d = Dialogue::new(model, bundle.messages());
    for _ in 0..max_steps {
        let reply = d.generate().await?;
        let calls = find_tool_calls(&reply);
        if calls.is_empty() {
            return Ok(d.finish(reply, num_options));
        }
        let results: Vec<String> = calls.iter().map(observation).collect();
        d.say(format!("Tool results:\n{}", results.join("\n")));
    }
    d.say(FINAL_REQUEST);
    let reply = d.generate().await?;
    Ok(d.finish(reply, num_options))
}
