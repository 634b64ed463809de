//! Supervised fine-tuning export: prompt/completion pairs with worked
//! solutions, spread evenly over step counts.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::text::{option_letter, options_block, rules_text, ANSWER_INSTRUCTION};
use super::{
    assemble_question, judge, parse_stem, Actions, Candidate, Dimension, Direction, InputMode, Question,
    StemSecond, Subject, TaskError, TaskSpec,
};
use crate::codec::{encode_cube, encode_shape, encode_shape_action, ShapeStyle, FORMAT_VERSION};
use crate::cube::apply_move;
use crate::render::RenderStyle;
use crate::rng::SeededRandom;
use crate::shape::{apply_action, StepError};

/// Everything needed to re-check a record without the generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SftAudit {
    pub question_id: String,
    pub spec: TaskSpec,
    pub stem_encoding: String,
    pub option_encodings: Vec<String>,
    pub gt_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SftRecord {
    pub prompt: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub images: Vec<String>,
    pub completion: String,
    pub steps: u32,
    pub audit: SftAudit,
    pub format_version: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SftManifest {
    pub dimension: Dimension,
    pub direction: Direction,
    pub s_max: u32,
    pub count: usize,
    pub seed: u64,
    pub per_step: BTreeMap<u32, usize>,
    pub format_version: u32,
}

#[derive(Debug, Error)]
pub enum SinkError {
    #[error("sink write failed: {0}")]
    Write(#[from] io::Error),
    #[error("record serialization failed: {0}")]
    Serialize(#[from] serde_json::Error),
}

#[derive(Debug, Error)]
pub enum SftError {
    #[error("invalid export request: {0}")]
    InvalidRequest(String),
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error(transparent)]
    Sink(#[from] SinkError),
    #[error("record fails verification: {0}")]
    InvalidRecord(String),
}

/// Destination for exported records.
pub trait RecordSink {
    fn write_record(&mut self, record: &SftRecord) -> Result<(), SinkError>;
}

impl RecordSink for Vec<SftRecord> {
    fn write_record(&mut self, record: &SftRecord) -> Result<(), SinkError> {
        self.push(record.clone());
        Ok(())
    }
}

/// One JSON object per line.
pub struct JsonlSink<W: Write>(pub W);

impl<W: Write> RecordSink for JsonlSink<W> {
    fn write_record(&mut self, record: &SftRecord) -> Result<(), SinkError> {
        serde_json::to_writer(&mut self.0, record)?;
        self.0.write_all(b"\n")?;
        Ok(())
    }
}

/// Records per step count: an even split, remainder to the lowest steps.
pub fn step_counts(s_max: u32, count: usize) -> BTreeMap<u32, usize> {
    let base = count / s_max as usize;
    let extra = count % s_max as usize;
    (1..=s_max).map(|s| (s, base + usize::from((s as usize) <= extra))).collect()
}

/// Writes `count` encoded-mode records covering steps `1..=s_max`, step 1
/// first. Record `i` uses the question seed drawn from substream `("sft", i)`.
pub fn export_sft(
    dimension: Dimension,
    direction: Direction,
    s_max: u32,
    count: usize,
    rng: &SeededRandom,
    sink: &mut dyn RecordSink,
) -> Result<SftManifest, SftError> {
    if s_max == 0 || count < s_max as usize {
        return Err(SftError::InvalidRequest(format!("need s_max >= 1 and count >= s_max, got {s_max} and {count}")));
    }
    let per_step = step_counts(s_max, count);
    let style = RenderStyle::default();
    let mut index = 0u64;
    for (&steps, &n) in &per_step {
        for _ in 0..n {
            let seed = rng.indexed("sft", index).next_u64();
            index += 1;
            let spec = TaskSpec::new(dimension, direction, steps, InputMode::Encoded, seed);
            let q = assemble_question(&spec, &style)?;
            sink.write_record(&sft_record(&q))?;
        }
    }
    Ok(SftManifest {
        dimension,
        direction,
        s_max,
        count,
        seed: rng.seed(),
        per_step,
        format_version: FORMAT_VERSION,
    })
}

fn sft_prompt(q: &Question) -> String {
    format!(
        "{}\n\n{}\n{}\n\n{ANSWER_INSTRUCTION}",
        rules_text(q.spec.dimension, q.spec.direction),
        q.stem_encoding(),
        options_block(&q.option_encodings())
    )
}

/// Step-by-step trace of `actions` from `initial`.
fn trace(initial: &Subject, actions: &Actions, dimension: Dimension) -> Result<String, TaskError> {
    let mut lines = Vec::new();
    match (initial, actions, dimension.shape_space()) {
        (Subject::Shape(s), Actions::Shape(list), Some(space)) => {
            let mut cur = s.clone();
            lines.push(format!("Start: {}", encode_shape(&cur, ShapeStyle::Compact)));
            for (i, a) in list.iter().enumerate() {
                cur = apply_action(&cur, a, space).map_err(|source| StepError { step: i + 1, source })?;
                lines.push(format!("Step {} {}: {}", i + 1, encode_shape_action(a), encode_shape(&cur, ShapeStyle::Compact)));
            }
        }
        (Subject::Cube(c), Actions::Cube(moves), None) => {
            let mut cur = *c;
            for (i, m) in moves.iter().enumerate() {
                cur = apply_move(&cur, *m);
                lines.push(format!("Step {} {}:\n{}", i + 1, m.token(), encode_cube(&cur)));
            }
        }
        _ => return Err(TaskError::WrongActionKind(dimension)),
    }
    Ok(lines.join("\n"))
}

/// Gold answer with a step-by-step engine trace, ending in `Answer: X`.
pub fn worked_solution(q: &Question) -> String {
    let letter = option_letter(q.gt_index);
    let steps = trace(&q.initial, &q.target_actions, q.spec.dimension).expect("generated actions apply");
    match q.spec.direction {
        Direction::Forward => format!("Applying the actions in order:\n{steps}\nThis matches option {letter}.\nAnswer: {letter}"),
        Direction::Inverse => {
            format!("Applying option {letter} to the initial state:\n{steps}\nThis reaches the target.\nAnswer: {letter}")
        }
    }
}

fn sft_record(q: &Question) -> SftRecord {
    SftRecord {
        prompt: sft_prompt(q),
        images: Vec::new(),
        completion: worked_solution(q),
        steps: q.spec.n,
        audit: SftAudit {
            question_id: q.id.clone(),
            spec: q.spec,
            stem_encoding: q.stem_encoding(),
            option_encodings: q.option_encodings(),
            gt_index: q.gt_index,
        },
        format_version: FORMAT_VERSION,
    }
}

/// Re-checks a record with the engines alone: exactly the gold option is
/// correct, and the completion ends with the gold letter.
pub fn validate_sft_record(record: &SftRecord) -> Result<(), SftError> {
    let audit = &record.audit;
    let dim = audit.spec.dimension;
    let bad = |m: String| Err(SftError::InvalidRecord(format!("{}: {m}", audit.question_id)));
    let (initial, second) = parse_stem(dim, &audit.stem_encoding)?;
    let options: Vec<Candidate> = audit
        .option_encodings
        .iter()
        .map(|o| match audit.spec.direction {
            Direction::Forward => Subject::parse(dim, o).map(Candidate::Outcome),
            Direction::Inverse => Actions::parse(dim, o).map(Candidate::Actions),
        })
        .collect::<Result<_, _>>()?;
    let target = match (&second, audit.spec.direction) {
        (StemSecond::Actions(a), Direction::Forward) => {
            if a.len() != record.steps as usize {
                return bad(format!("{} actions for {} steps", a.len(), record.steps));
            }
            initial.apply(a, dim)?
        }
        (StemSecond::Target(t), Direction::Inverse) => t.clone(),
        _ => return bad("stem does not match the direction".into()),
    };
    let correct: Vec<usize> = (0..options.len())
        .filter_map(|i| match judge(&initial, &target, &options[i], dim) {
            Ok(true) => Some(Ok(i)),
            Ok(false) => None,
            Err(e) => Some(Err(e)),
        })
        .collect::<Result<_, _>>()?;
    if correct != [audit.gt_index] {
        return bad(format!("correct options {correct:?}, gold {}", audit.gt_index));
    }
    let expected = format!("Answer: {}", option_letter(audit.gt_index));
    if record.completion.lines().last() != Some(expected.as_str()) {
        return bad("completion does not end with the gold letter".into());
    }
    if !record.prompt.contains(&audit.stem_encoding) {
        return bad("prompt lacks the stem".into());
    }
    Ok(())
}
