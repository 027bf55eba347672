//! Grounding of parsed schemas into a [`GroundTask`].
//!
//! Every operator is instantiated over all type-compatible object tuples.
//! A binding is dropped when
//! * a precondition uses a static predicate (never added or deleted by any
//!   operator) with an atom absent from the initial state, or
//! * two distinct add/delete templates collapse onto the same ground atom,
//!   which is how repeated-argument bindings such as `stack a a` show up.
//!
//! Atom and action ids follow the lexicographic order of their signatures,
//! so grounding the same inputs always yields the same numbering.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use crate::pddl::{AtomTemplate, Domain, GroundAtom, OperatorSchema, Problem, Term};
use crate::task::{GroundAction, GroundTask, TaskError};

/// Groundings larger than this are refused instead of exhausting memory.
pub const DEFAULT_MAX_GROUND_ACTIONS: usize = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroundError {
    #[error("grounding too large: operator `{operator}` alone has {bindings} bindings (limit {limit})")]
    TooLarge { operator: String, bindings: u128, limit: usize },
    #[error(transparent)]
    Task(#[from] TaskError),
}

struct RawAction {
    signature: String,
    pre: Vec<GroundAtom>,
    add: Vec<GroundAtom>,
    del: Vec<GroundAtom>,
}

fn instantiate(t: &AtomTemplate, binding: &BTreeMap<&str, &str>) -> GroundAtom {
    GroundAtom {
        predicate: t.predicate.clone(),
        args: t
            .args
            .iter()
            .map(|a| match a {
                Term::Var(v) => binding[v.as_str()].to_string(),
                Term::Const(c) => c.clone(),
            })
            .collect(),
    }
}

/// Returns the binding if it survives static and conflict pruning.
fn ground_binding(
    op: &OperatorSchema,
    args: &[&str],
    static_preds: &HashSet<&str>,
    init: &HashSet<&GroundAtom>,
) -> Option<RawAction> {
    let binding: BTreeMap<&str, &str> = op.params.iter().map(|p| p.name.as_str()).zip(args.iter().copied()).collect();
    let pre: Vec<GroundAtom> = op.pre.iter().map(|t| instantiate(t, &binding)).collect();
    if pre.iter().any(|a| static_preds.contains(a.predicate.as_str()) && !init.contains(a)) {
        return None;
    }
    let add: Vec<GroundAtom> = op.add.iter().map(|t| instantiate(t, &binding)).collect();
    let del: Vec<GroundAtom> = op.del.iter().map(|t| instantiate(t, &binding)).collect();
    for (ta, ga) in op.add.iter().zip(&add) {
        for (td, gd) in op.del.iter().zip(&del) {
            if ga == gd && ta != td {
                return None;
            }
        }
    }
    let mut signature = op.name.clone();
    for a in args {
        signature.push(' ');
        signature.push_str(a);
    }
    Some(RawAction { signature, pre, add, del })
}

/// Grounds `problem` against `domain`.
pub fn ground(domain: &Domain, problem: &Problem) -> Result<GroundTask, GroundError> {
    ground_with_limit(domain, problem, DEFAULT_MAX_GROUND_ACTIONS)
}

pub fn ground_with_limit(domain: &Domain, problem: &Problem, limit: usize) -> Result<GroundTask, GroundError> {
    let mut objects: Vec<(&str, &str)> =
        problem.objects.iter().chain(&domain.constants).map(|o| (o.name.as_str(), o.ty.as_str())).collect();
    objects.sort_unstable();
    objects.dedup_by_key(|o| o.0);

    let mut fluent: HashSet<&str> = HashSet::new();
    for op in &domain.operators {
        fluent.extend(op.add.iter().chain(&op.del).map(|t| t.predicate.as_str()));
    }
    let static_preds: HashSet<&str> =
        domain.predicates.iter().map(|p| p.name.as_str()).filter(|p| !fluent.contains(p)).collect();
    let init: HashSet<&GroundAtom> = problem.init.iter().collect();

    let mut raw = Vec::new();
    for op in &domain.operators {
        let candidates: Vec<Vec<&str>> = op
            .params
            .iter()
            .map(|p| objects.iter().filter(|(_, ty)| domain.is_subtype(ty, &p.ty)).map(|(n, _)| *n).collect())
            .collect();
        let bindings: u128 = candidates.iter().map(|c| c.len() as u128).product();
        if bindings > limit as u128 {
            return Err(GroundError::TooLarge { operator: op.name.clone(), bindings, limit });
        }
        if candidates.iter().any(Vec::is_empty) {
            continue;
        }
        // Odometer over the candidate lists.
        let mut idx = vec![0usize; candidates.len()];
        'bindings: loop {
            let args: Vec<&str> = idx.iter().zip(&candidates).map(|(&i, c)| c[i]).collect();
            if let Some(a) = ground_binding(op, &args, &static_preds, &init) {
                raw.push(a);
            }
            for k in (0..idx.len()).rev() {
                idx[k] += 1;
                if idx[k] < candidates[k].len() {
                    continue 'bindings;
                }
                idx[k] = 0;
            }
            break;
        }
        if raw.len() > limit {
            return Err(GroundError::TooLarge { operator: op.name.clone(), bindings: raw.len() as u128, limit });
        }
    }

    // Atom universe: everything mentioned by init, goal or an action.
    let mut universe: BTreeMap<String, GroundAtom> = BTreeMap::new();
    for a in problem.init.iter().chain(&problem.goal) {
        universe.entry(a.signature()).or_insert_with(|| a.clone());
    }
    for r in &raw {
        for a in r.pre.iter().chain(&r.add).chain(&r.del) {
            universe.entry(a.signature()).or_insert_with(|| a.clone());
        }
    }
    let ids: BTreeMap<&str, usize> = universe.keys().enumerate().map(|(i, k)| (k.as_str(), i)).collect();
    let id_of = |a: &GroundAtom| ids[a.signature().as_str()];

    raw.sort_by(|a, b| a.signature.cmp(&b.signature));
    let actions: Vec<GroundAction> = raw
        .iter()
        .map(|r| {
            GroundAction::new(
                r.signature.clone(),
                r.pre.iter().map(id_of).collect(),
                r.add.iter().map(id_of).collect(),
                r.del.iter().map(id_of).collect(),
            )
        })
        .collect();
    let init_ids: BTreeSet<usize> = problem.init.iter().map(id_of).collect();
    let goal_ids: BTreeSet<usize> = problem.goal.iter().map(id_of).collect();
    let atoms: Vec<GroundAtom> = universe.into_values().collect();
    Ok(GroundTask::new(problem.name.clone(), atoms, actions, init_ids, goal_ids)?)
}
