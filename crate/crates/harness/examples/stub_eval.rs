//! Evaluate the bundled engine-backed stub and an always-"A" stub.
//!
//! cargo run --release -p deformbench-harness --example stub_eval -- /tmp/eval

use deformbench::taskgen::{Dimension, Direction, InputMode};
use deformbench_harness::client::EndpointConfig;
use deformbench_harness::eval::{render_table, run_evaluation, EvalConfig};
use deformbench_harness::prompt::Strategy;
use deformbench_harness::strategy::StrategyLimits;

#[tokio::main]
async fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "eval-out".into());
    let config = EvalConfig {
        seed: 7,
        runs: 10,
        level_cap: Some(8),
        concurrency: 8,
        endpoints: vec![
            EndpointConfig::new("oracle", "stub", "stub"),
            EndpointConfig::new("always-a", "stub:Answer: A", "stub"),
        ],
        dimensions: Dimension::ALL.to_vec(),
        directions: Direction::ALL.to_vec(),
        modes: vec![InputMode::Encoded],
        strategies: vec![Strategy::Vanilla],
        limits: StrategyLimits::default(),
    };
    let report = run_evaluation(&config, out.as_ref()).await.unwrap();
    print!("{}", render_table(&report));
    println!("records in {out}");
}
