//! Macro-actions: mined patterns bound to the ground actions of a target
//! task, and the macro-enhanced search that uses them.

use std::collections::HashSet;
use std::fmt;
use std::fmt::Write as _;

use crate::mining::patterns::{decode_patterns, read_patterns, MinedPattern, PatternFileError};
use crate::mining::{ActionDictionary, Pattern};
use crate::search::{best_first, Heuristic, SearchOptions, SearchResult};
use crate::task::{applicable, successor, ActionId, ApplyError, GroundTask, State};

/// An ordered run of at least two ground actions of one task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Macro {
    pub steps: Vec<ActionId>,
    /// The pattern this macro was encoded from, as signatures.
    pub signatures: Vec<String>,
    pub support: usize,
}

impl Macro {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Provenance {
    pub corpus: String,
    pub minsup: Option<f64>,
}

/// Macros for one task, ordered by descending support, then by signatures.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MacroLibrary {
    pub macros: Vec<Macro>,
    pub provenance: Provenance,
}

impl MacroLibrary {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.macros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.macros.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DropReason {
    TooShort,
    UnknownAction(String),
    Duplicate,
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DropReason::TooShort => f.write_str("fewer than two steps"),
            DropReason::UnknownAction(sig) => write!(f, "no action `{sig}` in this task"),
            DropReason::Duplicate => f.write_str("duplicate"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dropped {
    pub pattern: MinedPattern,
    pub reason: DropReason,
    /// Source line when read from a file.
    pub line: Option<usize>,
}

fn bind(
    patterns: impl IntoIterator<Item = (Option<usize>, MinedPattern)>,
    task: &GroundTask,
    provenance: Provenance,
) -> (MacroLibrary, Vec<Dropped>) {
    let mut macros: Vec<Macro> = Vec::new();
    let mut dropped = Vec::new();
    let mut seen: HashSet<Vec<ActionId>> = HashSet::new();
    for (line, pattern) in patterns {
        let reason = if pattern.steps.len() < 2 {
            Some(DropReason::TooShort)
        } else {
            match pattern.steps.iter().find(|s| task.action_id(s).is_none()) {
                Some(missing) => Some(DropReason::UnknownAction(missing.clone())),
                None => {
                    let steps: Vec<ActionId> = pattern.steps.iter().map(|s| task.action_id(s).unwrap()).collect();
                    if seen.insert(steps.clone()) {
                        macros.push(Macro { steps, signatures: pattern.steps.clone(), support: pattern.support });
                        None
                    } else {
                        Some(DropReason::Duplicate)
                    }
                }
            }
        };
        if let Some(reason) = reason {
            dropped.push(Dropped { pattern, reason, line });
        }
    }
    macros.sort_by(|a, b| b.support.cmp(&a.support).then_with(|| a.signatures.cmp(&b.signatures)));
    (MacroLibrary { macros, provenance }, dropped)
}

/// Binds mined patterns to `task`. A pattern is kept only if every one of
/// its actions exists in the task and it has at least two steps.
pub fn encode_macros(
    patterns: &[Pattern],
    dict: &ActionDictionary,
    task: &GroundTask,
    provenance: Provenance,
) -> MacroLibrary {
    encode_mined(&decode_patterns(patterns, dict), task, provenance).0
}

/// Like [`encode_macros`] for patterns already spelled as signatures;
/// also reports what was dropped and why.
pub fn encode_mined(
    patterns: &[MinedPattern],
    task: &GroundTask,
    provenance: Provenance,
) -> (MacroLibrary, Vec<Dropped>) {
    bind(patterns.iter().cloned().map(|p| (None, p)), task, provenance)
}

pub fn macro_applicable(task: &GroundTask, s: &State, m: &Macro) -> bool {
    let mut cur = s.clone();
    for &step in &m.steps {
        let a = task.action(step);
        if !applicable(&cur, a) {
            return false;
        }
        cur = successor(&cur, a);
    }
    true
}

/// The states after each step of `m`, `s¹ … sⁿ`.
pub fn apply_macro(task: &GroundTask, s: &State, m: &Macro) -> Result<Vec<State>, ApplyError> {
    let mut out: Vec<State> = Vec::with_capacity(m.steps.len());
    for (step, &id) in m.steps.iter().enumerate() {
        let a = task.action(id);
        let cur = out.last().unwrap_or(s);
        if !applicable(cur, a) {
            let missing = a.pre.iter().copied().filter(|&p| !cur.contains(p)).collect();
            return Err(ApplyError::InapplicableAt { step, action: a.signature.clone(), missing });
        }
        out.push(successor(cur, a));
    }
    Ok(out)
}

/// A* where every expansion first tries each macro of `library` and then
/// the primitive actions. Plans come back fully primitive.
pub fn enhanced_astar(
    task: &GroundTask,
    library: &MacroLibrary,
    heuristic: &mut dyn Heuristic,
    opts: &SearchOptions,
) -> SearchResult {
    best_first(task, &library.macros, heuristic, opts)
}

/// Serialises a library: `;` header comments, then one pattern per line.
pub fn write_library(library: &MacroLibrary, date: &str) -> String {
    let mut out = String::from("; macro library\n");
    let _ = writeln!(out, "; corpus: {}", library.provenance.corpus);
    match library.provenance.minsup {
        Some(m) => {
            let _ = writeln!(out, "; minsup: {m}");
        }
        None => out.push_str("; minsup: unknown\n"),
    }
    let _ = writeln!(out, "; date: {date}");
    for m in &library.macros {
        let p = MinedPattern { steps: m.signatures.clone(), support: m.support };
        let _ = writeln!(out, "{}", p.to_line());
    }
    out
}

/// Reads a library file against `task`, reporting entries that do not bind.
pub fn read_library(text: &str, task: &GroundTask) -> Result<(MacroLibrary, Vec<Dropped>), PatternFileError> {
    let mut provenance = Provenance::default();
    for line in text.lines() {
        let Some(comment) = line.trim().strip_prefix(';') else { continue };
        if let Some(c) = comment.trim().strip_prefix("corpus:") {
            provenance.corpus = c.trim().to_string();
        } else if let Some(m) = comment.trim().strip_prefix("minsup:") {
            provenance.minsup = m.trim().parse().ok();
        }
    }
    let patterns = read_patterns(text)?;
    Ok(bind(patterns.into_iter().map(|(l, p)| (Some(l), p)), task, provenance))
}
