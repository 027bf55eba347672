//! Mined-pattern files: one pattern per line, `sig1 ; sig2 ; … #SUP: <count>`.
//!
//! Lines starting with `;` are comments (used by macro library headers).

use std::fmt::Write as _;

use thiserror::Error;

use super::{ActionDictionary, Pattern};

/// A pattern spelled out with action signatures instead of item ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MinedPattern {
    pub steps: Vec<String>,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("pattern line {line}: {message}")]
pub struct PatternFileError {
    pub line: usize,
    pub message: String,
}

const SUPPORT_TAG: &str = " #SUP: ";

impl MinedPattern {
    pub fn to_line(&self) -> String {
        format!("{}{SUPPORT_TAG}{}", self.steps.join(" ; "), self.support)
    }

    pub fn parse_line(line: &str) -> Result<Self, String> {
        let (body, sup) = line.rsplit_once(SUPPORT_TAG).ok_or_else(|| "missing ` #SUP: <count>`".to_string())?;
        let support = sup.trim().parse().map_err(|_| format!("bad support count `{}`", sup.trim()))?;
        let steps: Vec<String> = body.split(';').map(|s| s.split_whitespace().collect::<Vec<_>>().join(" ")).collect();
        if steps.iter().any(String::is_empty) {
            return Err("empty step in pattern".into());
        }
        Ok(MinedPattern { steps, support })
    }
}

/// Maps item-id patterns back to signatures. Items missing from the
/// dictionary are a caller bug.
pub fn decode_patterns(patterns: &[Pattern], dict: &ActionDictionary) -> Vec<MinedPattern> {
    patterns
        .iter()
        .map(|p| MinedPattern {
            steps: dict.decode(&p.items).expect("pattern items come from the dictionary"),
            support: p.support,
        })
        .collect()
}

pub fn write_patterns(patterns: &[MinedPattern]) -> String {
    let mut out = String::new();
    for p in patterns {
        let _ = writeln!(out, "{}", p.to_line());
    }
    out
}

/// Parses a pattern file, returning each pattern with its 1-based line number.
pub fn read_patterns(text: &str) -> Result<Vec<(usize, MinedPattern)>, PatternFileError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        let p = MinedPattern::parse_line(line).map_err(|message| PatternFileError { line: i + 1, message })?;
        out.push((i + 1, p));
    }
    Ok(out)
}
