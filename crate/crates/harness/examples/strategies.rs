//! Run one question through all six prompting strategies against the
//! oracle stub and show how many model calls each one made.
//!
//! cargo run -p deformbench-harness --example strategies

use deformbench::render::RenderStyle;
use deformbench::taskgen::{assemble_question, Dimension, Direction, InputMode, TaskSpec};
use deformbench_harness::client::{EndpointConfig, HttpEndpoint};
use deformbench_harness::prompt::{build_prompt, make_shot, Strategy};
use deformbench_harness::strategy::{run_strategy, StrategyLimits};
use deformbench_harness::stub::{spawn_stub, StubConfig};

#[tokio::main]
async fn main() {
    let stub = spawn_stub(StubConfig::oracle(), "127.0.0.1:0").await.unwrap();
    let model = HttpEndpoint::new(EndpointConfig::new("oracle", &stub.base_url(), "stub")).unwrap();
    let style = RenderStyle::default();
    let spec = TaskSpec::new(Dimension::TwoPointFiveD, Direction::Inverse, 3, InputMode::Image, 11);
    let q = assemble_question(&spec, &style).unwrap();

    let shot = make_shot(&spec, &style).unwrap();
    let prompt = build_prompt(&q, Strategy::FewShot, Some(shot.clone())).unwrap();
    println!("few-shot prompt: {} messages, {} images", prompt.messages().len(), prompt.image_count());
    println!("{}\n", prompt.messages().last().unwrap().joined_text());

    for strategy in Strategy::ALL {
        let shot = (strategy == Strategy::FewShot).then(|| shot.clone());
        let out = run_strategy(&model, &q, strategy, shot, StrategyLimits::default()).await.unwrap();
        println!(
            "{strategy:<16} answer {:?} (gold {}), {} call(s)",
            out.answer,
            q.gt_index,
            out.calls.len()
        );
    }
}
