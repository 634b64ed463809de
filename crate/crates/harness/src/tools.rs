//! Engine-backed tools the tool-using strategies may call.
//!
//! A call is written `CALL name("arg", "arg")` with JSON string arguments.

use deformbench::codec::{encode_cube, encode_moves, encode_shape, parse_cube, parse_moves, parse_shape, parse_shape_actions, ShapeStyle};
use deformbench::cube::apply_moves;
use deformbench::shape::{apply_actions, ShapeSpace};
use thiserror::Error;

pub const TOOL_GUIDE: &str = "\
You may call tools by writing a line `CALL name(\"arg\", ...)` with JSON string arguments:
- apply_shape_actions(shape_code, actions): the shape after the actions, e.g. CALL apply_shape_actions(\"Su--Ry--\", \"rotate_cw\")
- apply_cube_moves(cube_code, moves): the cube after the space-separated moves
- parse_shape(shape_code): the shape as a layer map
- encode_shape(shape): the compact code of a shape given in either form
Tool results are returned to you. Reply without a tool call when you are done.";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToolCall {
    pub name: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ToolError {
    #[error("malformed tool call: {0}")]
    ToolCallMalformed(String),
    #[error("unknown tool `{0}`")]
    UnknownTool(String),
    #[error("{0}")]
    Failed(String),
}

/// Every `CALL` in `text`, in order. A call whose arguments do not parse is
/// returned as an error in place so the model sees what went wrong.
pub fn find_tool_calls(text: &str) -> Vec<Result<ToolCall, ToolError>> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(at) = rest.find("CALL ") {
        let after = &rest[at + 5..];
        let name_len = after.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(after.len());
        let name = &after[..name_len];
        let tail = &after[name_len..];
        if name.is_empty() || !tail.starts_with('(') {
            out.push(Err(ToolError::ToolCallMalformed(format!("expected `name(` after CALL near `{}`", snippet(after)))));
            rest = after;
            continue;
        }
        let body = &tail[1..];
        let parsed = body.match_indices(')').find_map(|(close, _)| {
            serde_json::from_str::<Vec<String>>(&format!("[{}]", &body[..close])).ok().map(|args| (args, close))
        });
        match parsed {
            Some((args, close)) => {
                out.push(Ok(ToolCall { name: name.to_string(), args }));
                rest = &body[close + 1..];
            }
            None => {
                out.push(Err(ToolError::ToolCallMalformed(format!("arguments of {name} are not JSON strings"))));
                rest = body;
            }
        }
    }
    out
}

fn snippet(s: &str) -> String {
    s.chars().take(24).collect()
}

fn arity(call: &ToolCall, n: usize) -> Result<(), ToolError> {
    if call.args.len() == n {
        Ok(())
    } else {
        Err(ToolError::ToolCallMalformed(format!("{} takes {n} arguments, got {}", call.name, call.args.len())))
    }
}

fn failed(e: impl std::fmt::Display) -> ToolError {
    ToolError::Failed(e.to_string())
}

/// Runs a call against the engines.
pub fn execute(call: &ToolCall) -> Result<String, ToolError> {
    match call.name.as_str() {
        "apply_shape_actions" => {
            arity(call, 2)?;
            let shape = parse_shape(&call.args[0]).map_err(failed)?;
            let actions = parse_shape_actions(&call.args[1]).map_err(failed)?;
            let out = apply_actions(&shape, &actions, ShapeSpace::Stacked).map_err(failed)?;
            Ok(encode_shape(&out, ShapeStyle::Compact))
        }
        "apply_cube_moves" => {
            arity(call, 2)?;
            let cube = parse_cube(&call.args[0]).map_err(failed)?;
            let moves = parse_moves(&call.args[1]).map_err(failed)?;
            Ok(encode_cube(&apply_moves(&cube, &moves)))
        }
        "parse_shape" => {
            arity(call, 1)?;
            Ok(encode_shape(&parse_shape(&call.args[0]).map_err(failed)?, ShapeStyle::LayerMap))
        }
        "encode_shape" => {
            arity(call, 1)?;
            Ok(encode_shape(&parse_shape(&call.args[0]).map_err(failed)?, ShapeStyle::Compact))
        }
        "normalize_moves" => {
            arity(call, 1)?;
            Ok(encode_moves(&parse_moves(&call.args[0]).map_err(failed)?))
        }
        other => Err(ToolError::UnknownTool(other.to_string())),
    }
}

/// Tool output as fed back into the dialogue.
pub fn observation(call: &Result<ToolCall, ToolError>) -> String {
    let result = match call {
        Ok(c) => execute(c).map(|out| format!("{} -> {out}", c.name)),
        Err(e) => Err(e.clone()),
    };
    result.unwrap_or_else(|e| format!("Tool error: {e}"))
}
