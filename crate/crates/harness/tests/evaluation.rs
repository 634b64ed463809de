use std::fs;
use std::path::Path;

use deformbench::ladder::{run_ladder, FixedAgent, LadderConfig};
use deformbench::render::RenderStyle;
use deformbench::rng::SeededRandom;
use deformbench::taskgen::{Dimension, Direction, InputMode};
use deformbench_harness::client::EndpointConfig;
use deformbench_harness::eval::{rebuild_report, run_evaluation, EvalConfig, RunLine, TrialRecord};
use deformbench_harness::prompt::Strategy;
use deformbench_harness::strategy::StrategyLimits;
use deformbench_harness::stub::{spawn_stub, StubConfig};

fn config(endpoints: Vec<EndpointConfig>, runs: u32, cap: u32) -> EvalConfig {
    EvalConfig {
        seed: 2024,
        runs,
        level_cap: Some(cap),
        concurrency: 8,
        endpoints,
        dimensions: vec![Dimension::TwoD],
        directions: vec![Direction::Forward],
        modes: vec![InputMode::Encoded],
        strategies: vec![Strategy::Vanilla],
        limits: StrategyLimits::default(),
    }
}

fn stub_endpoint(name: &str, url: &str) -> EndpointConfig {
    EndpointConfig::new(name, url, "stub-model")
}

fn lines<T: serde::de::DeserializeOwned>(path: &Path) -> Vec<T> {
    fs::read_to_string(path).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[tokio::test]
async fn every_strategy_reaches_the_cap_with_the_oracle() {
    let out = tempfile::tempdir().unwrap();
    let cfg = EvalConfig {
        strategies: Strategy::ALL.to_vec(),
        modes: vec![InputMode::Encoded, InputMode::Image],
        directions: vec![Direction::Forward, Direction::Inverse],
        ..config(vec![stub_endpoint("oracle", "stub")], 2, 3)
    };
    let report = run_evaluation(&cfg, out.path()).await.unwrap();
    assert_eq!(report.cells.len(), 24);
    for cell in &report.cells {
        assert_eq!(cell.scores, vec![3, 3], "{}", cell.cell.key());
        assert_eq!(cell.mean, Some(3.0));
    }
    let trials: Vec<TrialRecord> = lines(&out.path().join("trials.jsonl"));
    assert!(trials.iter().all(|t| t.correct && !t.unparseable));
}

#[tokio::test]
async fn always_a_matches_the_fixed_agent() {
    let out = tempfile::tempdir().unwrap();
    let cfg = config(vec![stub_endpoint("always-a", "stub:Answer: A")], 40, 5);
    let report = run_evaluation(&cfg, out.path()).await.unwrap();
    let cell = &report.cells[0];
    let ladder = LadderConfig { level_cap: Some(5), input_mode: InputMode::Encoded, ..LadderConfig::default() };
    let expected: Vec<u32> = (0..40)
        .map(|run| {
            let rng = SeededRandom::new(cfg.run_seed(Dimension::TwoD, Direction::Forward, run));
            run_ladder(&mut FixedAgent(0), &ladder, &rng, &RenderStyle::default()).unwrap().score
        })
        .collect();
    assert_eq!(cell.scores, expected);
    let trials: Vec<TrialRecord> = lines(&out.path().join("trials.jsonl"));
    assert!(trials.iter().all(|t| t.extracted == Some(0) && t.correct == (t.gt_index == 0)));
}

#[tokio::test]
async fn report_is_recomputable_and_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = config(vec![stub_endpoint("oracle", "stub"), stub_endpoint("always-b", "stub:The answer is B")], 3, 3);
    let report = run_evaluation(&cfg, a.path()).await.unwrap();
    run_evaluation(&cfg, b.path()).await.unwrap();
    for file in ["report.json", "report.txt", "runs.jsonl", "history.jsonl"] {
        assert_eq!(fs::read(a.path().join(file)).unwrap(), fs::read(b.path().join(file)).unwrap(), "{file}");
    }
    let runs: Vec<RunLine> = lines(&a.path().join("runs.jsonl"));
    for cell in &report.cells {
        let scores: Vec<u32> =
            runs.iter().filter(|r| r.cell == cell.cell).map(|r| r.score.unwrap()).collect();
        let mean = scores.iter().sum::<u32>() as f64 / scores.len() as f64;
        assert_eq!(cell.mean, Some(mean));
    }
    assert_eq!(rebuild_report(a.path()).unwrap(), report);
}

#[tokio::test]
async fn tokens_never_reach_disk() {
    const TOKEN: &str = "sk-deformbench-secret-4f9a1c";
    std::env::set_var("DEFORMBENCH_TEST_EVAL_TOKEN", TOKEN);
    let stub =
        spawn_stub(StubConfig { required_token: Some(TOKEN.into()), ..StubConfig::oracle() }, "127.0.0.1:0").await.unwrap();
    let endpoint = EndpointConfig {
        token_env: Some("DEFORMBENCH_TEST_EVAL_TOKEN".into()),
        ..stub_endpoint("private", &stub.base_url())
    };
    let out = tempfile::tempdir().unwrap();
    let report = run_evaluation(&config(vec![endpoint], 2, 2), out.path()).await.unwrap();
    assert_eq!(report.cells[0].mean, Some(2.0));
    assert!(stub.request_count() > 0);
    let mut scanned = 0;
    for entry in fs::read_dir(out.path()).unwrap() {
        let bytes = fs::read(entry.unwrap().path()).unwrap();
        assert!(!bytes.windows(TOKEN.len()).any(|w| w == TOKEN.as_bytes()));
        scanned += 1;
    }
    assert!(scanned >= 6);
}
