//! Multi-run evaluations over a matrix of endpoints and task settings.
//!
//! Every cell of the matrix plays `runs` ladders. Run `i` of a
//! (dimension, direction) pair uses the same derived seed for every
//! endpoint, mode and strategy, so all of them face the same task set.
//! Output files, in the output directory:
//!
//! - `eval.json`: the configuration used
//! - `trials.jsonl`: one line per answered question
//! - `history.jsonl`: one line per ladder round
//! - `runs.jsonl`: one line per ladder run
//! - `report.json` and `report.txt`: mean level per cell

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use deformbench::codec::FORMAT_VERSION;
use deformbench::ladder::{LadderConfig, LadderError, LadderState, RoundRecord, Transition};
use deformbench::render::RenderStyle;
use deformbench::rng::{derive_seed, SeededRandom};
use deformbench::taskgen::{assemble_question, Dimension, Direction, InputMode, TaskError};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tokio::sync::Semaphore;
use tokio::task::JoinSet;

use crate::client::{ChatModel, EndpointConfig, HttpEndpoint, QueryError};
use crate::prompt::{make_shot, Strategy};
use crate::strategy::{run_strategy, StrategyError, StrategyLimits};
use crate::stub::{spawn_stub, StubConfig, StubHandle};
use crate::wire::Usage;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub seed: u64,
    #[serde(default = "default_runs")]
    pub runs: u32,
    #[serde(default)]
    pub level_cap: Option<u32>,
    /// Ladder runs in flight at once.
    #[serde(default = "default_concurrency")]
    pub concurrency: usize,
    pub endpoints: Vec<EndpointConfig>,
    pub dimensions: Vec<Dimension>,
    pub directions: Vec<Direction>,
    pub modes: Vec<InputMode>,
    #[serde(default = "default_strategies")]
    pub strategies: Vec<Strategy>,
    #[serde(default)]
    pub limits: StrategyLimits,
}

fn default_runs() -> u32 {
    10
}
fn default_concurrency() -> usize {
    8
}
fn default_strategies() -> Vec<Strategy> {
    vec![Strategy::Vanilla]
}

impl EvalConfig {
    pub fn from_toml(text: &str) -> Result<Self, EvalError> {
        toml::from_str(text).map_err(|e| EvalError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, EvalError> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for e in &self.endpoints {
            for &dimension in &self.dimensions {
                for &direction in &self.directions {
                    for &input_mode in &self.modes {
                        for &strategy in &self.strategies {
                            out.push(Cell { endpoint: e.name.clone(), dimension, direction, input_mode, strategy });
                        }
                    }
                }
            }
        }
        out
    }

    /// Seed of ladder run `run` for a task family.
    pub fn run_seed(&self, dimension: Dimension, direction: Direction, run: u32) -> u64 {
        derive_seed(self.seed, &format!("{dimension}/{direction}/run{run}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub endpoint: String,
    pub dimension: Dimension,
    pub direction: Direction,
    pub input_mode: InputMode,
    pub strategy: Strategy,
}

impl Cell {
    pub fn key(&self) -> String {
        format!("{}/{}/{}/{}/{}", self.endpoint, self.dimension, self.direction, self.input_mode, self.strategy)
    }

    fn ladder_config(&self, cap: Option<u32>) -> LadderConfig {
        LadderConfig {
            level_cap: cap,
            dimension: self.dimension,
            direction: self.direction,
            input_mode: self.input_mode,
            ..LadderConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub run_id: String,
    pub round: u32,
    pub level: u32,
    pub question_id: String,
    pub raw_output: String,
    pub extracted: Option<usize>,
    /// The final reply held no readable option letter; scored as wrong.
    pub unparseable: bool,
    pub correct: bool,
    pub gt_index: usize,
    pub model_calls: usize,
    pub latency_ms: u64,
    pub usage: Usage,
    pub format_version: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryLine {
    pub run_id: String,
    #[serde(flatten)]
    pub record: RoundRecord,
    pub format_version: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunLine {
    pub run_id: String,
    pub cell: Cell,
    pub run_index: u32,
    pub seed: u64,
    pub score: Option<u32>,
    pub capped: bool,
    pub rounds: usize,
    pub error: Option<String>,
    pub format_version: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    #[serde(flatten)]
    pub cell: Cell,
    pub scores: Vec<u32>,
    /// Absent when any run failed.
    pub mean: Option<f64>,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub seed: u64,
    pub runs: u32,
    pub level_cap: Option<u32>,
    pub cells: Vec<CellReport>,
    pub format_version: u32,
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error("inconsistent results: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Error)]
enum RunFailure {
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error(transparent)]
    Ladder(#[from] LadderError),
}

struct RunOutcome {
    line: RunLine,
    trials: Vec<TrialRecord>,
    history: Vec<HistoryLine>,
}

struct RunJob {
    model: Arc<dyn ChatModel>,
    cell: Cell,
    run_index: u32,
    seed: u64,
    level_cap: Option<u32>,
    limits: StrategyLimits,
}

async fn play(job: &RunJob, run_id: &str, state: &mut LadderState, trials: &mut Vec<TrialRecord>) -> Result<(), RunFailure> {
    let style = RenderStyle::default();
    let config = job.cell.ladder_config(job.level_cap);
    let rng = SeededRandom::new(job.seed);
    while !state.terminal {
        let specs = state.next_batch(&config, &rng)?;
        let (mut ids, mut answers, mut correct) = (Vec::new(), Vec::new(), 0);
        for spec in &specs {
            let q = assemble_question(spec, &style)?;
            let shot = match job.cell.strategy {
                Strategy::FewShot => Some(make_shot(spec, &style)?),
                _ => None,
            };
            let out = run_strategy(job.model.as_ref(), &q, job.cell.strategy, shot, job.limits).await?;
            let ok = out.answer == Some(q.gt_index);
            correct += u32::from(ok);
            trials.push(TrialRecord {
                run_id: run_id.to_string(),
                round: state.history.len() as u32 + 1,
                level: state.level,
                question_id: q.id.clone(),
                raw_output: out.final_text.clone(),
                extracted: out.answer,
                unparseable: out.answer.is_none(),
                correct: ok,
                gt_index: q.gt_index,
                model_calls: out.calls.len(),
                latency_ms: out.latency().as_millis() as u64,
                usage: out.usage(),
                format_version: FORMAT_VERSION,
            });
            ids.push(q.id);
            answers.push(out.answer);
        }
        state.record_round(&config, correct, ids, answers)?;
    }
    Ok(())
}

async fn run_job(job: RunJob) -> RunOutcome {
    let run_id = format!("{}#{}", job.cell.key(), job.run_index);
    let mut state = LadderState::new(&job.cell.ladder_config(job.level_cap));
    let mut trials = Vec::new();
    let result = play(&job, &run_id, &mut state, &mut trials).await;
    if let Err(e) = &result {
        tracing::warn!(run = %run_id, error = %e, "ladder run failed");
    }
    let history = state
        .history
        .iter()
        .map(|r| HistoryLine { run_id: run_id.clone(), record: r.clone(), format_version: FORMAT_VERSION })
        .collect();
    RunOutcome {
        line: RunLine {
            run_id,
            cell: job.cell,
            run_index: job.run_index,
            seed: job.seed,
            score: result.is_ok().then(|| state.score()),
            capped: state.capped,
            rounds: state.history.len(),
            error: result.err().map(|e| e.to_string()),
            format_version: FORMAT_VERSION,
        },
        trials,
        history,
    }
}

/// Endpoints ready to query. Holds any in-process stubs alive.
pub struct Models {
    pub by_name: BTreeMap<String, Arc<dyn ChatModel>>,
    _stubs: Vec<StubHandle>,
}

/// `stub` starts the engine-backed stub; `stub:TEXT` starts one that
/// always replies TEXT.
pub async fn connect(endpoints: &[EndpointConfig]) -> Result<Models, EvalError> {
    let mut by_name: BTreeMap<String, Arc<dyn ChatModel>> = BTreeMap::new();
    let mut stubs = Vec::new();
    for e in endpoints {
        let mut e = e.clone();
        let stub = match e.base_url.as_str() {
            "stub" => Some(StubConfig::oracle()),
            url => url.strip_prefix("stub:").map(StubConfig::fixed),
        };
        if let Some(stub) = stub {
            let handle = spawn_stub(stub, "127.0.0.1:0").await?;
            e.base_url = handle.base_url();
            stubs.push(handle);
        }
        if by_name.insert(e.name.clone(), Arc::new(HttpEndpoint::new(e.clone())?)).is_some() {
            return Err(EvalError::Config(format!("duplicate endpoint name `{}`", e.name)));
        }
    }
    Ok(Models { by_name, _stubs: stubs })
}

/// Runs every cell and writes all output files to `out`.
pub async fn run_evaluation(config: &EvalConfig, out: &Path) -> Result<Report, EvalError> {
    let cells = config.cells();
    if cells.is_empty() {
        return Err(EvalError::Config("the evaluation matrix has no cells".into()));
    }
    let models = connect(&config.endpoints).await?;
    let permits = Arc::new(Semaphore::new(config.concurrency.max(1)));
    let mut set = JoinSet::new();
    for (ci, cell) in cells.iter().enumerate() {
        for run_index in 0..config.runs {
            let job = RunJob {
                model: models.by_name[&cell.endpoint].clone(),
                cell: cell.clone(),
                run_index,
                seed: config.run_seed(cell.dimension, cell.direction, run_index),
                level_cap: config.level_cap,
                limits: config.limits,
            };
            let permits = permits.clone();
            set.spawn(async move {
                let _permit = permits.acquire_owned().await.expect("semaphore open");
                (ci, run_index, run_job(job).await)
            });
        }
    }
    let mut outcomes = Vec::new();
    while let Some(done) = set.join_next().await {
        outcomes.push(done.map_err(|e| EvalError::Inconsistent(format!("run task panicked: {e}")))?);
    }
    outcomes.sort_by_key(|(ci, run, _)| (*ci, *run));

    fs::create_dir_all(out)?;
    fs::write(out.join("eval.json"), serde_json::to_string_pretty(config)?)?;
    let mut trials = BufWriter::new(File::create(out.join("trials.jsonl"))?);
    let mut history = BufWriter::new(File::create(out.join("history.jsonl"))?);
    let mut runs = BufWriter::new(File::create(out.join("runs.jsonl"))?);
    let mut lines = Vec::new();
    for (_, _, o) in outcomes {
        for t in &o.trials {
            writeln!(trials, "{}", serde_json::to_string(t)?)?;
        }
        for h in &o.history {
            writeln!(history, "{}", serde_json::to_string(h)?)?;
        }
        writeln!(runs, "{}", serde_json::to_string(&o.line)?)?;
        lines.push(o.line);
    }
    trials.flush()?;
    history.flush()?;
    runs.flush()?;
    let report = build_report(config, &lines);
    write_report(&report, out)?;
    Ok(report)
}

pub fn build_report(config: &EvalConfig, lines: &[RunLine]) -> Report {
    let cells = config
        .cells()
        .into_iter()
        .map(|cell| {
            let mine: Vec<&RunLine> = lines.iter().filter(|l| l.cell == cell).collect();
            let scores: Vec<u32> = mine.iter().filter_map(|l| l.score).collect();
            let errors: Vec<String> = mine.iter().filter_map(|l| l.error.clone()).collect();
            let mean = (errors.is_empty() && !scores.is_empty())
                .then(|| scores.iter().map(|&s| f64::from(s)).sum::<f64>() / scores.len() as f64);
            CellReport { cell, scores, mean, errors }
        })
        .collect();
    Report { seed: config.seed, runs: config.runs, level_cap: config.level_cap, cells, format_version: FORMAT_VERSION }
}

/// Results table: one row per endpoint, strategy and mode; one column per
/// dimension and direction.
pub fn render_table(report: &Report) -> String {
    let mut columns: Vec<(Dimension, Direction)> = Vec::new();
    let mut rows: Vec<(String, Strategy, InputMode)> = Vec::new();
    for c in &report.cells {
        let col = (c.cell.dimension, c.cell.direction);
        if !columns.contains(&col) {
            columns.push(col);
        }
        let row = (c.cell.endpoint.clone(), c.cell.strategy, c.cell.input_mode);
        if !rows.contains(&row) {
            rows.push(row);
        }
    }
    let mut out = String::new();
    let cap = report.level_cap.map_or("none".to_string(), |c| c.to_string());
    let _ = writeln!(out, "mean level over {} runs (seed {}, level cap {cap})", report.runs, report.seed);
    let _ = write!(out, "{:<32}", "endpoint / strategy / mode");
    for (d, r) in &columns {
        let _ = write!(out, " {:>12}", format!("{d} {}", &r.label()[..3]));
    }
    out.push('\n');
    for (endpoint, strategy, mode) in &rows {
        let _ = write!(out, "{:<32}", format!("{endpoint} / {strategy} / {mode}"));
        for (d, r) in &columns {
            let cell = report.cells.iter().find(|c| {
                (&c.cell.endpoint, c.cell.strategy, c.cell.input_mode, c.cell.dimension, c.cell.direction)
                    == (endpoint, *strategy, *mode, *d, *r)
            });
            let text = match cell {
                Some(CellReport { mean: Some(m), .. }) => format!("{m:.1}"),
                Some(_) => "error".to_string(),
                None => "-".to_string(),
            };
            let _ = write!(out, " {text:>12}");
        }
        out.push('\n');
    }
    out
}

pub fn write_report(report: &Report, out: &Path) -> Result<(), EvalError> {
    fs::write(out.join("report.json"), serde_json::to_string_pretty(report)? + "\n")?;
    fs::write(out.join("report.txt"), render_table(report))?;
    Ok(())
}

fn read_lines<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, EvalError> {
    let mut out = Vec::new();
    for line in BufReader::new(File::open(path)?).lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

/// Level after the last recorded round of a run.
fn final_level(rounds: &[&RoundRecord], start: u32) -> u32 {
    rounds.last().map_or(start, |r| match r.transition {
        Transition::Promoted | Transition::CapReached => r.level + 1,
        Transition::Demoted | Transition::Terminated => r.level - 1,
    })
}

/// Rebuilds the report from the persisted files of an evaluation directory,
/// checking every run score against its round history.
pub fn rebuild_report(dir: &Path) -> Result<Report, EvalError> {
    let config: EvalConfig = serde_json::from_str(&fs::read_to_string(dir.join("eval.json"))?)?;
    let runs: Vec<RunLine> = read_lines(&dir.join("runs.jsonl"))?;
    let history: Vec<HistoryLine> = read_lines(&dir.join("history.jsonl"))?;
    for run in &runs {
        let rounds: Vec<&RoundRecord> = history.iter().filter(|h| h.run_id == run.run_id).map(|h| &h.record).collect();
        let start = LadderConfig::default().start_level;
        if let Some(score) = run.score {
            let replayed = final_level(&rounds, start);
            if replayed != score || rounds.len() != run.rounds {
                return Err(EvalError::Inconsistent(format!(
                    "{}: score {score} but history ends at level {replayed}",
                    run.run_id
                )));
            }
        }
    }
    let report = build_report(&config, &runs);
    write_report(&report, dir)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(base_url: &str) -> EvalConfig {
        EvalConfig::from_toml(&format!(
            r#"
            seed = 3
            runs = 2
            level_cap = 4
            dimensions = ["2d", "3d"]
            directions = ["forward", "inverse"]
            modes = ["encoded"]
            strategies = ["vanilla", "self_reflection"]

            [[endpoints]]
            name = "stub"
            base_url = "{base_url}"
            model = "oracle"
            "#
        ))
        .unwrap()
    }

    #[tokio::test]
    async fn oracle_stub_hits_the_cap() {
        let dir = tempfile::tempdir().unwrap();
        let report = run_evaluation(&config("stub"), dir.path()).await.unwrap();
        assert_eq!(report.cells.len(), 8);
        for c in &report.cells {
            assert_eq!(c.mean, Some(4.0), "{}", c.cell.key());
        }
        let text = fs::read_to_string(dir.path().join("report.txt")).unwrap();
        assert!(text.contains("4.0"));
        let rebuilt = rebuild_report(dir.path()).unwrap();
        assert_eq!(rebuilt, report);
    }

    #[tokio::test]
    async fn unreachable_endpoint_fails_its_cells_only() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config("stub");
        let mut dead = EndpointConfig::new("dead", "http://127.0.0.1:9/v1", "none");
        dead.max_retries = 0;
        dead.timeout_secs = 2;
        cfg.endpoints.push(dead);
        cfg.dimensions = vec![Dimension::TwoD];
        cfg.strategies = vec![Strategy::Vanilla];
        let report = run_evaluation(&cfg, dir.path()).await.unwrap();
        for c in &report.cells {
            match c.cell.endpoint.as_str() {
                "stub" => assert_eq!(c.mean, Some(4.0)),
                _ => assert!(c.mean.is_none() && !c.errors.is_empty()),
            }
        }
        assert!(render_table(&report).contains("error"));
    }
}
