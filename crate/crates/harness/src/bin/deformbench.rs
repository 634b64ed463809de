//! Command-line front end. Each subcommand is a thin wrapper over the
//! library crates.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::Command;

use clap::{Parser, Subcommand};
use deformbench::ladder::{
    run_ladder, Agent, BernoulliAgent, LadderConfig, OracleAgent, RandomAgent, RunError,
};
use deformbench::render::{render_figure, render_option_sheet, RenderStyle};
use deformbench::rng::SeededRandom;
use deformbench::taskgen::{
    assemble_question, export_sft, parse_stem, read_bundle, write_bundle, Dimension, Direction, InputMode,
    JsonlSink, Question, StemSecond, Subject, TaskSpec,
};
use deformbench_harness::eval::{rebuild_report, render_table, run_evaluation, write_report, EvalConfig};
use deformbench_harness::serve::{serve, ServeConfig};
use deformbench_harness::stub::{spawn_stub, StubConfig};
use tracing_subscriber::EnvFilter;

type BoxError = Box<dyn std::error::Error + Send + Sync>;

#[derive(Parser)]
#[command(name = "deformbench", version, about = "Spatial deformation benchmark tools")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a question bundle.
    Gen {
        #[arg(long)]
        dim: Dimension,
        #[arg(long)]
        dir: Direction,
        #[arg(long)]
        steps: u32,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value = "image")]
        mode: InputMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        style: Option<PathBuf>,
    },
    /// Write supervised fine-tuning records with worked solutions.
    ExportSft {
        #[arg(long)]
        dim: Dimension,
        #[arg(long)]
        dir: Direction,
        #[arg(long)]
        smax: u32,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-render the figures of a bundle.
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        style: Option<PathBuf>,
        /// Also rasterize with `rsvg-convert`.
        #[arg(long)]
        png: bool,
    },
    /// Run an evaluation described by a TOML file.
    Eval {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate ladder runs with a synthetic agent.
    LadderSim {
        /// `oracle`, `random` or `p:<prob>`.
        #[arg(long, default_value = "oracle")]
        agent: String,
        #[arg(long, default_value_t = 10)]
        runs: u32,
        #[arg(long, default_value = "2d")]
        dim: Dimension,
        #[arg(long, default_value = "fwd")]
        dir: Direction,
        #[arg(long, default_value = "encoded")]
        mode: InputMode,
        #[arg(long)]
        level_cap: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Serve interactive ladder sessions over HTTP.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: String,
        #[arg(long, default_value = "2d")]
        dim: Dimension,
        #[arg(long, default_value = "fwd")]
        dir: Direction,
        #[arg(long, default_value = "image")]
        mode: InputMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        level_cap: Option<u32>,
        #[arg(long)]
        history: Option<PathBuf>,
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
    },
    /// Rebuild the report of an evaluation output directory.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Run the deterministic stub model endpoint.
    Stub {
        #[arg(long, default_value = "127.0.0.1:8081")]
        bind: String,
        /// Always reply with this text instead of solving.
        #[arg(long)]
        reply: Option<String>,
    },
}

fn load_style(path: Option<&Path>) -> Result<RenderStyle, BoxError> {
    Ok(match path {
        Some(p) => RenderStyle::from_toml(&fs::read_to_string(p)?)?,
        None => RenderStyle::default(),
    })
}

fn generate(spec: TaskSpec, count: usize, style: &RenderStyle) -> Result<Vec<Question>, BoxError> {
    let rng = SeededRandom::new(spec.seed);
    (0..count as u64)
        .map(|i| {
            let seed = rng.indexed("gen", i).next_u64();
            Ok(assemble_question(&TaskSpec { seed, ..spec }, style)?)
        })
        .collect()
}

fn rasterize(svg: &Path) -> Result<(), BoxError> {
    let png = svg.with_extension("png");
    let status = Command::new("rsvg-convert")
        .arg("-o")
        .arg(&png)
        .arg(svg)
        .status()
        .map_err(|e| format!("could not run rsvg-convert: {e}"))?;
    if !status.success() {
        return Err(format!("rsvg-convert failed on {}", svg.display()).into());
    }
    Ok(())
}

fn render_bundle(input: &Path, out: &Path, style: &RenderStyle, png: bool) -> Result<usize, BoxError> {
    fs::create_dir_all(out)?;
    let mut written = 0;
    for rec in read_bundle(input)? {
        let dim = rec.spec.dimension;
        let (initial, second) = parse_stem(dim, &rec.stem_encoding)?;
        let target = match second {
            StemSecond::Actions(a) => {
                let options =
                    rec.option_encodings.iter().map(|o| Subject::parse(dim, o)).collect::<Result<Vec<_>, _>>()?;
                let figures: Vec<_> = options.iter().map(Subject::figure).collect();
                let path = out.join(format!("{}-options.svg", rec.id));
                fs::write(&path, render_option_sheet(&figures, style)?)?;
                if png {
                    rasterize(&path)?;
                }
                written += 1;
                initial.apply(&a, dim)?
            }
            StemSecond::Target(t) => t,
        };
        for (name, subject) in [("initial", &initial), ("target", &target)] {
            let path = out.join(format!("{}-{name}.svg", rec.id));
            fs::write(&path, render_figure(&subject.figure(), style))?;
            if png {
                rasterize(&path)?;
            }
            written += 1;
        }
    }
    Ok(written)
}

enum SimAgent {
    Oracle(OracleAgent),
    Random(RandomAgent),
    Bernoulli(BernoulliAgent),
}

impl Agent for SimAgent {
    type Error = std::convert::Infallible;
    fn answer(&mut self, q: &Question) -> Result<Option<usize>, Self::Error> {
        match self {
            SimAgent::Oracle(a) => a.answer(q),
            SimAgent::Random(a) => a.answer(q),
            SimAgent::Bernoulli(a) => a.answer(q),
        }
    }
}

fn sim_agent(name: &str, rng: SeededRandom) -> Result<SimAgent, BoxError> {
    Ok(match name {
        "oracle" => SimAgent::Oracle(OracleAgent),
        "random" => SimAgent::Random(RandomAgent(rng)),
        _ => {
            let p: f64 = name
                .strip_prefix("p:")
                .and_then(|p| p.parse().ok())
                .filter(|p| (0.0..=1.0).contains(p))
                .ok_or_else(|| format!("unknown agent `{name}`"))?;
            SimAgent::Bernoulli(BernoulliAgent { p, rng })
        }
    })
}

#[tokio::main]
async fn main() -> Result<(), BoxError> {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .with_writer(std::io::stderr)
        .init();

    match Cli::parse().command {
        Cmd::Gen { dim, dir, steps, count, mode, seed, out, style } => {
            let style = load_style(style.as_deref())?;
            let spec = TaskSpec::new(dim, dir, steps, mode, seed);
            spec.validate()?;
            let questions = generate(spec, count, &style)?;
            write_bundle(&out, &questions)?;
            println!("wrote {} questions to {}", questions.len(), out.display());
        }
        Cmd::ExportSft { dim, dir, smax, count, seed, out } => {
            let mut sink = JsonlSink(BufWriter::new(File::create(&out)?));
            let manifest = export_sft(dim, dir, smax, count, &SeededRandom::new(seed), &mut sink)?;
            sink.0.flush()?;
            println!("{}", serde_json::to_string_pretty(&manifest)?);
        }
        Cmd::Render { input, out, style, png } => {
            let n = render_bundle(&input, &out, &load_style(style.as_deref())?, png)?;
            println!("wrote {n} figures to {}", out.display());
        }
        Cmd::Eval { config, out } => {
            let report = run_evaluation(&EvalConfig::load(&config)?, &out).await?;
            print!("{}", render_table(&report));
        }
        Cmd::LadderSim { agent, runs, dim, dir, mode, level_cap, seed } => {
            let config = LadderConfig { dimension: dim, direction: dir, input_mode: mode, level_cap, ..Default::default() };
            let style = RenderStyle::default();
            let master = SeededRandom::new(seed);
            let mut total = 0u64;
            for run in 0..runs as u64 {
                let rng = master.indexed("run", run);
                let mut a = sim_agent(&agent, rng.substream("agent"))?;
                let result = run_ladder(&mut a, &config, &rng, &style).map_err(|e| match e {
                    RunError::Ladder(e) => e,
                    RunError::Agent { error, .. } => match error {},
                })?;
                println!("run {run}: score {}", result.score);
                total += u64::from(result.score);
            }
            if runs > 0 {
                println!("mean {:.4}", total as f64 / f64::from(runs));
            }
        }
        Cmd::Serve { bind, dim, dir, mode, seed, level_cap, history, static_dir } => {
            let config = ServeConfig {
                seed,
                level_cap,
                dimension: dim,
                direction: dir,
                input_mode: mode,
                history_dir: history,
                static_dir,
            };
            serve(&bind, config).await?;
        }
        Cmd::Report { input } => {
            let report = rebuild_report(&input)?;
            write_report(&report, &input)?;
            print!("{}", render_table(&report));
        }
        Cmd::Stub { bind, reply } => {
            let config = reply.as_deref().map_or_else(StubConfig::oracle, StubConfig::fixed);
            let handle = spawn_stub(config, &bind).await?;
            println!("stub listening at {}", handle.base_url());
            tokio::signal::ctrl_c().await?;
        }
    }
    Ok(())
}
