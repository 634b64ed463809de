//! Score synthetic agents on the adaptive ladder.
//!
//! cargo run --release -p deformbench-core --example ladder_sim

use deformbench::ladder::{run_ladder, BernoulliAgent, LadderConfig, OracleAgent, RandomAgent};
use deformbench::render::RenderStyle;
use deformbench::rng::SeededRandom;

fn main() {
    let style = RenderStyle::default();
    let capped = LadderConfig { level_cap: Some(10), ..LadderConfig::default() };
    let run = run_ladder(&mut OracleAgent, &capped, &SeededRandom::new(0), &style).unwrap();
    println!("oracle with cap 10: score {} after {} rounds", run.score, run.state.rounds());

    let config = LadderConfig::default();
    let runs = 500;
    for p in [0.25, 0.5, 0.6] {
        let mut total = 0;
        for i in 0..runs {
            let rng = SeededRandom::new(1).indexed("run", i);
            let agent = &mut BernoulliAgent { p, rng: rng.substream("agent") };
            total += run_ladder(agent, &config, &rng, &style).unwrap().score;
        }
        println!("p = {p}: mean score {:.3}", f64::from(total) / runs as f64);
    }
    let mut total = 0;
    for i in 0..runs {
        let rng = SeededRandom::new(2).indexed("run", i);
        total += run_ladder(&mut RandomAgent(rng.substream("agent")), &config, &rng, &style).unwrap().score;
    }
    println!("uniform guesser: mean score {:.4}", f64::from(total) / runs as f64);
}
