//! Multiple-choice question generation.
//!
//! A question is built in five steps from a single [`TaskSpec`]: draw the
//! initial object, draw the target action list, derive distractor lists by
//! replacing `r` positions, execute everything with the engines, then shuffle
//! the truth into a uniformly drawn slot. Each step reads its own substream
//! of the `TaskSpec` seed, so the direction never changes which objects are drawn:
//! a forward and an inverse question with the same seed share their truth.

mod actions;
mod bundle;
mod sft;
mod text;

pub use actions::{draw_shape_action, gen_action_list, gen_distractors, RETRY_CAP};
pub use bundle::{read_bundle, write_bundle, BundleRecord, QUESTIONS_FILE};
pub use sft::{
    export_sft, step_counts, validate_sft_record, JsonlSink, RecordSink, SftAudit, SftManifest,
    SftError, SftRecord, SinkError, worked_solution,
};
pub use text::{option_letter, options_block, rules_text, ANSWER_INSTRUCTION};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::codec::{
    encode_cube, encode_moves, encode_shape, encode_shape_actions, parse_cube, parse_moves,
    parse_shape, parse_shape_actions, CodecError, ShapeStyle,
};
use crate::cube::{apply_moves, scramble, CubeMove, CubeState};
use crate::render::{render_figure, render_option_sheet, CubeView, Figure, RenderError, RenderStyle, MAX_OPTIONS};
use crate::rng::SeededRandom;
use crate::shape::{apply_actions, generate_shape, GenConfig, GenError, Shape, ShapeAction, ShapeSpace, StepError};

/// Scramble length for initial cube states.
pub const SCRAMBLE_LENGTH: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dimension {
    #[serde(rename = "2d")]
    TwoD,
    #[serde(rename = "2.5d")]
    TwoPointFiveD,
    #[serde(rename = "3d")]
    ThreeD,
}

impl Dimension {
    pub const ALL: [Dimension; 3] = [Dimension::TwoD, Dimension::TwoPointFiveD, Dimension::ThreeD];

    pub fn label(self) -> &'static str {
        match self {
            Dimension::TwoD => "2d",
            Dimension::TwoPointFiveD => "2.5d",
            Dimension::ThreeD => "3d",
        }
    }

    pub fn shape_space(self) -> Option<ShapeSpace> {
        match self {
            Dimension::TwoD => Some(ShapeSpace::Flat),
            Dimension::TwoPointFiveD => Some(ShapeSpace::Stacked),
            Dimension::ThreeD => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Inverse,
}

impl Direction {
    pub const ALL: [Direction; 2] = [Direction::Forward, Direction::Inverse];

    pub fn label(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Inverse => "inverse",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputMode {
    Image,
    Encoded,
}

impl InputMode {
    pub const ALL: [InputMode; 2] = [InputMode::Image, InputMode::Encoded];

    pub fn label(self) -> &'static str {
        match self {
            InputMode::Image => "image",
            InputMode::Encoded => "encoded",
        }
    }
}

macro_rules! label_parsing {
    ($ty:ty, $($text:literal => $value:expr),+ $(,)?) => {
        impl FromStr for $ty {
            type Err = TaskError;
            fn from_str(s: &str) -> Result<Self, TaskError> {
                match s.to_ascii_lowercase().as_str() {
                    $($text => Ok($value),)+
                    _ => Err(TaskError::InvalidSpec(format!(
                        "unknown {} `{s}`",
                        stringify!($ty).to_lowercase()
                    ))),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.pad(self.label())
            }
        }
    };
}

label_parsing!(Dimension, "2d" => Dimension::TwoD, "2.5d" => Dimension::TwoPointFiveD, "3d" => Dimension::ThreeD);
label_parsing!(Direction, "fwd" => Direction::Forward, "forward" => Direction::Forward, "inv" => Direction::Inverse, "inverse" => Direction::Inverse);
label_parsing!(InputMode, "image" => InputMode::Image, "encoded" => InputMode::Encoded);

/// Everything needed to regenerate one question byte for byte.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TaskSpec {
    pub dimension: Dimension,
    pub direction: Direction,
    /// Number of deformation steps.
    pub n: u32,
    /// Number of distractors.
    pub k: u32,
    /// Positions replaced per distractor.
    pub r: u32,
    pub input_mode: InputMode,
    pub seed: u64,
}

impl TaskSpec {
    pub const DEFAULT_K: u32 = 3;
    pub const DEFAULT_R: u32 = 1;

    pub fn new(dimension: Dimension, direction: Direction, n: u32, input_mode: InputMode, seed: u64) -> Self {
        Self {
            dimension,
            direction,
            n,
            k: Self::DEFAULT_K,
            r: Self::DEFAULT_R,
            input_mode,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), TaskError> {
        if self.n == 0 {
            return Err(TaskError::InvalidSpec("n must be at least 1".into()));
        }
        if self.k == 0 {
            return Err(TaskError::InvalidSpec("k must be at least 1".into()));
        }
        if self.r == 0 || self.r > self.n {
            return Err(TaskError::InvalidSpec(format!("r = {} must lie in 1..={}", self.r, self.n)));
        }
        if self.input_mode == InputMode::Image && self.k as usize + 1 > MAX_OPTIONS {
            return Err(TaskError::InvalidSpec(format!(
                "an option sheet holds at most {MAX_OPTIONS} options, k = {}",
                self.k
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum TaskError {
    #[error("invalid task spec: {0}")]
    InvalidSpec(String),
    #[error("gave up at {site} after {attempts} attempts")]
    ExhaustedRetries { site: &'static str, attempts: usize },
    #[error(transparent)]
    Generator(#[from] GenError),
    #[error(transparent)]
    Engine(#[from] StepError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("malformed stem: {0}")]
    MalformedStem(String),
    #[error("action list does not match the {0} task")]
    WrongActionKind(Dimension),
}

/// The object a task deforms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Subject {
    Shape(Shape),
    Cube(CubeState),
}

impl Subject {
    /// Canonical text form: compact shape code or the six-face cube matrix.
    pub fn encode(&self) -> String {
        match self {
            Subject::Shape(s) => encode_shape(s, ShapeStyle::Compact),
            Subject::Cube(c) => encode_cube(c),
        }
    }

    pub fn parse(dimension: Dimension, code: &str) -> Result<Self, TaskError> {
        Ok(match dimension {
            Dimension::ThreeD => Subject::Cube(parse_cube(code)?),
            _ => Subject::Shape(parse_shape(code)?),
        })
    }

    pub fn apply(&self, actions: &Actions, dimension: Dimension) -> Result<Subject, TaskError> {
        match (self, actions, dimension.shape_space()) {
            (Subject::Shape(s), Actions::Shape(a), Some(space)) => Ok(Subject::Shape(apply_actions(s, a, space)?)),
            (Subject::Cube(c), Actions::Cube(m), None) => Ok(Subject::Cube(apply_moves(c, m))),
            _ => Err(TaskError::WrongActionKind(dimension)),
        }
    }

    pub fn figure(&self) -> Figure<'_> {
        match self {
            Subject::Shape(s) => Figure::Shape(s),
            Subject::Cube(c) => Figure::Cube(c, CubeView::Net),
        }
    }
}

/// A deformation sequence in either action alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Actions {
    Shape(Vec<ShapeAction>),
    Cube(Vec<CubeMove>),
}

impl Actions {
    pub fn len(&self) -> usize {
        match self {
            Actions::Shape(a) => a.len(),
            Actions::Cube(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn encode(&self) -> String {
        match self {
            Actions::Shape(a) => encode_shape_actions(a),
            Actions::Cube(m) => encode_moves(m),
        }
    }

    pub fn parse(dimension: Dimension, code: &str) -> Result<Self, TaskError> {
        Ok(match dimension {
            Dimension::ThreeD => Actions::Cube(parse_moves(code)?),
            _ => Actions::Shape(parse_shape_actions(code)?),
        })
    }
}

/// One answer choice.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Candidate {
    /// Forward tasks offer resulting objects.
    Outcome(Subject),
    /// Inverse tasks offer action lists.
    Actions(Actions),
}

impl Candidate {
    pub fn encode(&self) -> String {
        match self {
            Candidate::Outcome(s) => s.encode(),
            Candidate::Actions(a) => a.encode(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssetRole {
    Initial,
    Target,
    OptionSheet,
}

/// A rendered SVG, addressed by the hash of its bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Asset {
    pub role: AssetRole,
    pub hash: String,
    pub svg: String,
}

impl Asset {
    pub fn new(role: AssetRole, svg: String) -> Self {
        Self { role, hash: hex::encode(Sha256::digest(svg.as_bytes())), svg }
    }

    /// Path relative to a bundle directory.
    pub fn relative_path(&self) -> String {
        format!("assets/{}.svg", self.hash)
    }
}

/// Text sections of a stem.
pub const SECTION_INITIAL: &str = "[initial]";
pub const SECTION_ACTIONS: &str = "[actions]";
pub const SECTION_TARGET: &str = "[target]";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Question {
    pub id: String,
    pub spec: TaskSpec,
    pub initial: Subject,
    pub target_actions: Actions,
    /// `initial` after `target_actions`.
    pub target: Subject,
    pub options: Vec<Candidate>,
    pub gt_index: usize,
    /// Empty in encoded mode.
    pub assets: Vec<Asset>,
}

impl Question {
    /// Stem as codec text: the initial object plus the actions (forward) or
    /// the target (inverse), each under a bracketed section header.
    pub fn stem_encoding(&self) -> String {
        let second = match self.spec.direction {
            Direction::Forward => (SECTION_ACTIONS, self.target_actions.encode()),
            Direction::Inverse => (SECTION_TARGET, self.target.encode()),
        };
        format!("{SECTION_INITIAL}\n{}\n{}\n{}", self.initial.encode(), second.0, second.1)
    }

    pub fn option_encodings(&self) -> Vec<String> {
        self.options.iter().map(Candidate::encode).collect()
    }

    /// Does option `index` solve the question, judged by the engines alone?
    pub fn option_is_correct(&self, index: usize) -> Result<bool, TaskError> {
        let option = self.options.get(index).ok_or_else(|| {
            TaskError::InvalidSpec(format!("option {index} out of range"))
        })?;
        judge(&self.initial, &self.target, option, self.spec.dimension)
    }

    pub fn asset(&self, role: AssetRole) -> Option<&Asset> {
        self.assets.iter().find(|a| a.role == role)
    }
}

/// Engine verdict for a single candidate.
pub fn judge(initial: &Subject, target: &Subject, option: &Candidate, dimension: Dimension) -> Result<bool, TaskError> {
    Ok(match option {
        Candidate::Outcome(s) => s == target,
        Candidate::Actions(a) => match initial.apply(a, dimension) {
            Ok(reached) => &reached == target,
            // a list the engine rejects cannot reach anything
            Err(TaskError::Engine(_)) => false,
            Err(e) => return Err(e),
        },
    })
}

/// Bracketed sections of a text, in order, as `(header, body)`. Blank
/// lines are dropped; text before the first header is an error.
pub fn parse_sections(text: &str) -> Result<Vec<(String, String)>, TaskError> {
    let mut sections: Vec<(String, Vec<&str>)> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.starts_with('[') && line.ends_with(']') {
            sections.push((line.to_string(), Vec::new()));
        } else if let Some((_, body)) = sections.last_mut() {
            if !line.is_empty() {
                body.push(line);
            }
        } else if !line.is_empty() {
            return Err(TaskError::MalformedStem(format!("text before the first section: `{line}`")));
        }
    }
    Ok(sections.into_iter().map(|(h, b)| (h, b.join("\n"))).collect())
}

/// Splits a stem into its initial object and the second section, which is
/// an action list (forward) or a target object (inverse).
pub fn parse_stem(dimension: Dimension, stem: &str) -> Result<(Subject, StemSecond), TaskError> {
    let sections = parse_sections(stem)?;
    let find = |name: &str| sections.iter().find(|(h, _)| h == name).map(|(_, b)| b.as_str());
    let initial = find(SECTION_INITIAL).ok_or_else(|| TaskError::MalformedStem("missing [initial]".into()))?;
    let initial = Subject::parse(dimension, initial)?;
    if let Some(actions) = find(SECTION_ACTIONS) {
        Ok((initial, StemSecond::Actions(Actions::parse(dimension, actions)?)))
    } else if let Some(target) = find(SECTION_TARGET) {
        Ok((initial, StemSecond::Target(Subject::parse(dimension, target)?)))
    } else {
        Err(TaskError::MalformedStem("missing [actions] or [target]".into()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StemSecond {
    Actions(Actions),
    Target(Subject),
}

/// Step 1: the object to deform.
pub fn gen_initial(dimension: Dimension, rng: &mut SeededRandom) -> Result<Subject, TaskError> {
    Ok(match dimension {
        Dimension::ThreeD => Subject::Cube(scramble(SCRAMBLE_LENGTH, rng).0),
        Dimension::TwoD => Subject::Shape(generate_shape(&GenConfig::default(), rng)?),
        Dimension::TwoPointFiveD => {
            let num_layers = 2 + rng.below(3) as u8;
            let config = GenConfig { num_layers, ..GenConfig::default() };
            Subject::Shape(generate_shape(&config, rng)?)
        }
    })
}

/// Builds a complete question from its spec. The result is a pure function
/// of `spec` and `style`.
pub fn assemble_question(spec: &TaskSpec, style: &RenderStyle) -> Result<Question, TaskError> {
    spec.validate()?;
    let root = SeededRandom::new(spec.seed);
    let initial = gen_initial(spec.dimension, &mut root.substream("initial"))?;
    let target_actions = gen_action_list(&initial, spec, &mut root.substream("actions"))?;
    let distractors = gen_distractors(&initial, &target_actions, spec, &mut root.substream("distractors"))?;
    let target = initial.apply(&target_actions, spec.dimension)?;

    let gt_index = root.substream("gt").index(spec.k as usize + 1);
    let mut lists = distractors;
    lists.insert(gt_index, target_actions.clone());
    let options: Vec<Candidate> = match spec.direction {
        Direction::Inverse => lists.into_iter().map(Candidate::Actions).collect(),
        Direction::Forward => lists
            .iter()
            .map(|l| initial.apply(l, spec.dimension).map(Candidate::Outcome))
            .collect::<Result<_, _>>()?,
    };

    let assets = match spec.input_mode {
        InputMode::Encoded => Vec::new(),
        InputMode::Image => {
            let mut assets = vec![Asset::new(AssetRole::Initial, render_figure(&initial.figure(), style))];
            match spec.direction {
                Direction::Forward => {
                    let figures: Vec<Figure> = options
                        .iter()
                        .map(|o| match o {
                            Candidate::Outcome(s) => s.figure(),
                            Candidate::Actions(_) => unreachable!("forward options are outcomes"),
                        })
                        .collect();
                    assets.push(Asset::new(AssetRole::OptionSheet, render_option_sheet(&figures, style)?));
                }
                Direction::Inverse => {
                    assets.push(Asset::new(AssetRole::Target, render_figure(&target.figure(), style)));
                }
            }
            assets
        }
    };

    let mut question = Question {
        id: String::new(),
        spec: *spec,
        initial,
        target_actions,
        target,
        options,
        gt_index,
        assets,
    };
    question.id = content_id(&question);
    Ok(question)
}

fn content_id(q: &Question) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(&q.spec).expect("spec serializes"));
    h.update(b"\x00");
    h.update(q.stem_encoding().as_bytes());
    for o in q.option_encodings() {
        h.update(b"\x00");
        h.update(o.as_bytes());
    }
    h.update(b"\x00");
    h.update(q.gt_index.to_le_bytes());
    hex::encode(&h.finalize()[..16])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn spec(dim: Dimension, dir: Direction, n: u32, seed: u64) -> TaskSpec {
        TaskSpec::new(dim, dir, n, InputMode::Encoded, seed)
    }

    #[test]
    fn labels_parse_back() {
        for d in Dimension::ALL {
            assert_eq!(d.label().parse::<Dimension>().unwrap(), d);
        }
        assert_eq!("fwd".parse::<Direction>().unwrap(), Direction::Forward);
        assert_eq!("inv".parse::<Direction>().unwrap(), Direction::Inverse);
        assert!("4d".parse::<Dimension>().is_err());
        let json = serde_json::to_string(&spec(Dimension::TwoPointFiveD, Direction::Inverse, 2, 9)).unwrap();
        assert!(json.contains("\"2.5d\"") && json.contains("\"inverse\""));
    }

    #[test]
    fn spec_validation() {
        let mut s = spec(Dimension::TwoD, Direction::Forward, 2, 0);
        assert!(s.validate().is_ok());
        s.r = 3;
        assert!(s.validate().is_err());
        s.r = 1;
        s.n = 0;
        assert!(s.validate().is_err());
        let mut img = TaskSpec::new(Dimension::TwoD, Direction::Forward, 1, InputMode::Image, 0);
        img.k = 6;
        assert!(img.validate().is_err());
    }

    #[test]
    fn exactly_one_correct_forward_2d() {
        let style = RenderStyle::default();
        for seed in 0..50 {
            let q = assemble_question(&spec(Dimension::TwoD, Direction::Forward, 1, seed), &style).unwrap();
            let correct: Vec<usize> = (0..q.options.len()).filter(|&i| q.option_is_correct(i).unwrap()).collect();
            assert_eq!(correct, vec![q.gt_index]);
        }
    }

    #[test]
    fn direction_shares_truth() {
        let style = RenderStyle::default();
        for dim in Dimension::ALL {
            let f = assemble_question(&spec(dim, Direction::Forward, 3, 11), &style).unwrap();
            let i = assemble_question(&spec(dim, Direction::Inverse, 3, 11), &style).unwrap();
            assert_eq!(f.gt_index, i.gt_index);
            let Candidate::Actions(gold) = &i.options[i.gt_index] else { panic!() };
            let Candidate::Outcome(out) = &f.options[f.gt_index] else { panic!() };
            assert_eq!(&f.initial.apply(gold, dim).unwrap(), out);
        }
    }

    #[test]
    fn ids_differ_across_seeds() {
        let style = RenderStyle::default();
        let ids: HashSet<String> = (0..200)
            .map(|s| assemble_question(&spec(Dimension::ThreeD, Direction::Forward, 1, s), &style).unwrap().id)
            .collect();
        assert_eq!(ids.len(), 200);
    }

    #[test]
    fn stem_roundtrip() {
        let style = RenderStyle::default();
        for dim in Dimension::ALL {
            for dir in Direction::ALL {
                let q = assemble_question(&spec(dim, dir, 2, 5), &style).unwrap();
                let (initial, second) = parse_stem(dim, &q.stem_encoding()).unwrap();
                assert_eq!(initial, q.initial);
                match second {
                    StemSecond::Actions(a) => assert_eq!(a, q.target_actions),
                    StemSecond::Target(t) => assert_eq!(t, q.target),
                }
            }
        }
    }

    #[test]
    fn image_assets_per_direction() {
        let style = RenderStyle::default();
        let f = assemble_question(&TaskSpec::new(Dimension::TwoD, Direction::Forward, 1, InputMode::Image, 3), &style)
            .unwrap();
        assert!(f.asset(AssetRole::Initial).is_some() && f.asset(AssetRole::OptionSheet).is_some());
        let i = assemble_question(&TaskSpec::new(Dimension::ThreeD, Direction::Inverse, 1, InputMode::Image, 3), &style)
            .unwrap();
        assert!(i.asset(AssetRole::Target).is_some() && i.asset(AssetRole::OptionSheet).is_none());
        let e = assemble_question(&spec(Dimension::TwoD, Direction::Forward, 1, 3), &style).unwrap();
        assert!(e.assets.is_empty());
    }
}
