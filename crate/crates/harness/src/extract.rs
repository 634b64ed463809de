//! Reading the chosen option out of free-form model output.

use std::sync::LazyLock;

use regex::Regex;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no option letter found in the reply")]
pub struct Unparseable;

static KEYWORD: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)\b(?:answer|option|final)\b(?:\s+answer)?\s*(?:is\s*)?([:=]?)([\s(\[*]*)([a-z])[)\]*]*(?:\b|$)")
        .expect("valid regex")
});

static BARE_LINE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^[\s(\[*]*([A-Z])[\s)\]*.]*$").expect("valid regex"));

/// 0-based index of the last option letter stated in `raw`.
///
/// Recognized forms are `Answer: X`, `option X`, `final: X` (keywords in
/// any case) and a last line holding nothing but the letter. A lowercase
/// letter only counts after a colon or an opening bracket, so prose such
/// as "the answer is a circle" is not read as option A.
pub fn extract_answer(raw: &str, num_options: usize) -> Result<usize, Unparseable> {
    let in_range = |c: char| {
        let i = (c.to_ascii_uppercase() as usize).wrapping_sub('A' as usize);
        (i < num_options).then_some(i)
    };
    let mut best: Option<(usize, usize)> = None;
    for cap in KEYWORD.captures_iter(raw) {
        let letter = cap[3].chars().next().expect("one letter");
        let delimited = !cap[1].is_empty() || cap[2].contains(['(', '[']);
        if letter.is_ascii_lowercase() && !delimited {
            continue;
        }
        if let Some(i) = in_range(letter) {
            best = Some((cap.get(3).expect("group").start(), i));
        }
    }
    if let Some(line) = raw.lines().rev().find(|l| !l.trim().is_empty()) {
        if let Some(cap) = BARE_LINE.captures(line) {
            let at = cap.get(1).expect("group");
            let pos = line.as_ptr() as usize - raw.as_ptr() as usize + at.start();
            if let Some(i) = in_range(at.as_str().chars().next().expect("one letter")) {
                if best.is_none_or(|(p, _)| pos > p) {
                    best = Some((pos, i));
                }
            }
        }
    }
    best.map(|(_, i)| i).ok_or(Unparseable)
}
