//! Start the ladder session service and play a session over HTTP,
//! answering every question with option A.
//!
//! cargo run -p deformbench-harness --example session_client

use deformbench::taskgen::InputMode;
use deformbench_harness::serve::{spawn_serve, ServeConfig};
use serde_json::{json, Value};

#[tokio::main]
async fn main() {
    let config = ServeConfig { input_mode: InputMode::Encoded, level_cap: Some(5), ..ServeConfig::default() };
    let base = format!("http://{}", spawn_serve(config).await.unwrap());
    let http = reqwest::Client::new();

    let mut session: Value =
        http.post(format!("{base}/v1/sessions")).json(&json!({"seed": 42})).send().await.unwrap().json().await.unwrap();
    let id = session["session_id"].as_str().unwrap().to_string();
    println!("session {id}, level {}", session["level"]);
    println!("first stem:\n{}", session["batch"][0]["stem_text"].as_str().unwrap());

    while session["terminal"] == false {
        for q in session["batch"].as_array().unwrap().clone() {
            let reply: Value = http
                .post(format!("{base}/v1/sessions/{id}/answers"))
                .json(&json!({"question_id": q["question_id"], "option_index": 0}))
                .send()
                .await
                .unwrap()
                .json()
                .await
                .unwrap();
            if reply["round_complete"] == true {
                println!("round done: {} -> level {}", reply["transition"], reply["session"]["level"]);
            }
            session = reply["session"].clone();
        }
    }
    println!("final score {}", session["score"]);
}
