//! Chat-completions wire format shared by the client and the stub.

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::prompt::{ChatMessage, Part, Role};

const SVG_DATA_PREFIX: &str = "data:image/svg+xml;base64,";

/// Request body with greedy decoding pinned.
pub fn request_body(model: &str, messages: &[ChatMessage]) -> Value {
    let messages: Vec<Value> = messages
        .iter()
        .map(|m| {
            let content: Vec<Value> = m
                .parts
                .iter()
                .map(|p| match p {
                    Part::Text(t) => json!({"type": "text", "text": t}),
                    Part::Svg(svg) => json!({
                        "type": "image_url",
                        "image_url": {"url": format!("{SVG_DATA_PREFIX}{}", STANDARD.encode(svg))}
                    }),
                })
                .collect();
            json!({"role": m.role, "content": content})
        })
        .collect();
    json!({
        "model": model,
        "messages": messages,
        "temperature": 0,
        "top_p": 1,
        "top_k": 1,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Usage {
    #[serde(default)]
    pub prompt_tokens: u64,
    #[serde(default)]
    pub completion_tokens: u64,
}

#[derive(Deserialize)]
struct ResponseBody {
    choices: Vec<Choice>,
    #[serde(default)]
    usage: Option<Usage>,
}

#[derive(Deserialize)]
struct Choice {
    message: ResponseMessage,
}

#[derive(Deserialize)]
struct ResponseMessage {
    content: Option<String>,
}

/// Text of the first choice.
pub fn parse_response(body: &str) -> Result<(String, Option<Usage>), String> {
    let parsed: ResponseBody = serde_json::from_str(body).map_err(|e| e.to_string())?;
    let text = parsed
        .choices
        .into_iter()
        .next()
        .and_then(|c| c.message.content)
        .ok_or_else(|| "response has no message content".to_string())?;
    Ok((text, parsed.usage))
}

pub fn response_body(model: &str, text: &str, usage: Usage) -> Value {
    json!({
        "object": "chat.completion",
        "model": model,
        "choices": [{"index": 0, "message": {"role": "assistant", "content": text}, "finish_reason": "stop"}],
        "usage": usage,
    })
}

/// Messages back out of a request body. Image parts that are not base64 SVG
/// data URLs are dropped.
pub fn decode_messages(body: &Value) -> Result<Vec<ChatMessage>, String> {
    let list = body["messages"].as_array().ok_or("`messages` is not an array")?;
    list.iter()
        .map(|m| {
            let role: Role = serde_json::from_value(m["role"].clone()).map_err(|e| e.to_string())?;
            let parts = match &m["content"] {
                Value::String(s) => vec![Part::Text(s.clone())],
                Value::Array(items) => items
                    .iter()
                    .filter_map(|item| match item["type"].as_str() {
                        Some("text") => item["text"].as_str().map(|t| Part::Text(t.to_string())),
                        Some("image_url") => item["image_url"]["url"]
                            .as_str()
                            .and_then(|u| u.strip_prefix(SVG_DATA_PREFIX))
                            .and_then(|b| STANDARD.decode(b).ok())
                            .and_then(|bytes| String::from_utf8(bytes).ok())
                            .map(Part::Svg),
                        _ => None,
                    })
                    .collect(),
                _ => return Err("message content must be a string or an array".to_string()),
            };
            Ok(ChatMessage { role, parts })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn body_roundtrip() {
        let msgs = vec![
            ChatMessage::text(Role::System, "rules"),
            ChatMessage { role: Role::User, parts: vec![Part::Svg("<svg/>".into()), Part::Text("q".into())] },
        ];
        let body = request_body("m", &msgs);
        assert_eq!(body["temperature"], 0);
        assert_eq!(body["top_p"], 1);
        assert_eq!(body["top_k"], 1);
        assert_eq!(decode_messages(&body).unwrap(), msgs);
    }

    #[test]
    fn response_roundtrip() {
        let body = response_body("m", "Answer: A", Usage { prompt_tokens: 3, completion_tokens: 2 });
        let (text, usage) = parse_response(&body.to_string()).unwrap();
        assert_eq!(text, "Answer: A");
        assert_eq!(usage.unwrap().completion_tokens, 2);
        assert!(parse_response("{}").is_err());
    }
}
