//! Question bundles: one JSON object per line plus content-addressed SVGs.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Question, TaskSpec};
use crate::codec::FORMAT_VERSION;

pub const QUESTIONS_FILE: &str = "questions.jsonl";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleRecord {
    pub id: String,
    pub spec: TaskSpec,
    pub stem_encoding: String,
    pub option_encodings: Vec<String>,
    pub gt_index: usize,
    pub asset_paths: Vec<String>,
    pub format_version: u32,
}

impl From<&Question> for BundleRecord {
    fn from(q: &Question) -> Self {
        Self {
            id: q.id.clone(),
            spec: q.spec,
            stem_encoding: q.stem_encoding(),
            option_encodings: q.option_encodings(),
            gt_index: q.gt_index,
            asset_paths: q.assets.iter().map(|a| a.relative_path()).collect(),
            format_version: FORMAT_VERSION,
        }
    }
}

/// Writes `questions.jsonl` and `assets/*.svg` under `dir`.
pub fn write_bundle(dir: &Path, questions: &[Question]) -> io::Result<()> {
    fs::create_dir_all(dir.join("assets"))?;
    let mut out = BufWriter::new(File::create(dir.join(QUESTIONS_FILE))?);
    for q in questions {
        for a in &q.assets {
            let path = dir.join(a.relative_path());
            if !path.exists() {
                fs::write(path, &a.svg)?;
            }
        }
        serde_json::to_writer(&mut out, &BundleRecord::from(q))?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn read_bundle(path: &Path) -> io::Result<Vec<BundleRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut records = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line)?);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::render::RenderStyle;
    use crate::taskgen::{assemble_question, Dimension, Direction, InputMode};

    #[test]
    fn bundle_roundtrip_with_assets() {
        let dir = tempfile::tempdir().unwrap();
        let style = RenderStyle::default();
        let qs: Vec<Question> = (0..3)
            .map(|s| {
                let spec = TaskSpec::new(Dimension::TwoPointFiveD, Direction::Forward, 2, InputMode::Image, s);
                assemble_question(&spec, &style).unwrap()
            })
            .collect();
        write_bundle(dir.path(), &qs).unwrap();
        let back = read_bundle(&dir.path().join(QUESTIONS_FILE)).unwrap();
        assert_eq!(back.len(), 3);
        for (r, q) in back.iter().zip(&qs) {
            assert_eq!(r, &BundleRecord::from(q));
            for p in &r.asset_paths {
                let svg = fs::read_to_string(dir.path().join(p)).unwrap();
                assert!(svg.starts_with("<?xml"));
            }
        }
    }
}
