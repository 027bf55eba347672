//! Plans, the plan file format, and plan validation.
//!
//! Plan files hold one step per line as `(name arg1 ... argk)`, lowercase
//! with single spaces. Lines starting with `;` are comments, and writers
//! finish with a `; cost = <n>` line.

use std::fmt;

use thiserror::Error;

use crate::task::{apply, ActionId, AtomId, GroundTask};

/// A sequence of ground action signatures.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Plan {
    pub steps: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("plan line {line}: {message}")]
pub struct PlanParseError {
    pub line: usize,
    pub message: String,
}

impl Plan {
    pub fn new(steps: Vec<String>) -> Self {
        Plan { steps }
    }

    pub fn from_ids(task: &GroundTask, ids: &[ActionId]) -> Self {
        Plan { steps: ids.iter().map(|&i| task.action(i).signature.clone()).collect() }
    }

    /// Unit costs: cost is the number of steps.
    pub fn cost(&self) -> usize {
        self.steps.len()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Resolves every step against `task`, returning the first unknown one on failure.
    pub fn resolve(&self, task: &GroundTask) -> Result<Vec<ActionId>, (usize, String)> {
        self.steps.iter().enumerate().map(|(i, s)| task.action_id(s).ok_or_else(|| (i, s.clone()))).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push('(');
            out.push_str(s);
            out.push_str(")\n");
        }
        out.push_str(&format!("; cost = {}\n", self.cost()));
        out
    }

    pub fn parse(text: &str) -> Result<Plan, PlanParseError> {
        let mut steps = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with(';') {
                continue;
            }
            let err = |message: &str| PlanParseError { line: i + 1, message: message.to_string() };
            let inner = line
                .strip_prefix('(')
                .and_then(|l| l.strip_suffix(')'))
                .ok_or_else(|| err("expected `(name args...)`"))?;
            if inner.contains(['(', ')']) {
                return Err(err("nested parentheses"));
            }
            let sig = inner.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
            if sig.is_empty() {
                return Err(err("empty step"));
            }
            steps.push(sig);
        }
        Ok(Plan { steps })
    }
}

impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Why a plan failed to validate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanFailure {
    UnknownAction { step: usize, signature: String },
    Inapplicable { step: usize, missing: Vec<AtomId> },
    GoalNotReached { missing: Vec<AtomId> },
}

impl fmt::Display for PlanFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanFailure::UnknownAction { step, signature } => {
                write!(f, "unknown action `{signature}` at step {step}")
            }
            PlanFailure::Inapplicable { step, missing } => {
                write!(f, "inapplicable at step {step} (missing atoms {missing:?})")
            }
            PlanFailure::GoalNotReached { missing } => write!(f, "goal not reached (missing atoms {missing:?})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanValidation {
    pub valid: bool,
    pub failure: Option<PlanFailure>,
}

/// Simulates `plan` from the initial state and checks the goal.
pub fn validate_plan(task: &GroundTask, plan: &Plan) -> PlanValidation {
    let fail = |f| PlanValidation { valid: false, failure: Some(f) };
    let ids = match plan.resolve(task) {
        Ok(ids) => ids,
        Err((step, signature)) => return fail(PlanFailure::UnknownAction { step, signature }),
    };
    let mut state = task.init().clone();
    for (step, &id) in ids.iter().enumerate() {
        match apply(&state, task.action(id)) {
            Ok(next) => state = next,
            Err(e) => {
                let missing = match e {
                    crate::task::ApplyError::Inapplicable { missing, .. }
                    | crate::task::ApplyError::InapplicableAt { missing, .. } => missing,
                };
                return fail(PlanFailure::Inapplicable { step, missing });
            }
        }
    }
    let missing: Vec<AtomId> = task.goal().iter().copied().filter(|&g| !state.contains(g)).collect();
    if missing.is_empty() {
        PlanValidation { valid: true, failure: None }
    } else {
        fail(PlanFailure::GoalNotReached { missing })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_format_is_exact() {
        let plan = Plan::new(vec!["pick-up a".into(), "stack a b".into()]);
        assert_eq!(plan.to_text(), "(pick-up a)\n(stack a b)\n; cost = 2\n");
        assert_eq!(Plan::default().to_text(), "; cost = 0\n");
    }

    #[test]
    fn parse_normalises_case_and_spacing() {
        let text = "; header\n(PICK-UP   a)\n\n  (stack a  b)  \n; cost = 2\n";
        assert_eq!(Plan::parse(text).unwrap().steps, ["pick-up a", "stack a b"]);
    }

    #[test]
    fn parse_rejects_garbage_with_line_number() {
        let err = Plan::parse("(a)\nb c\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(Plan::parse("()").is_err());
    }
}
