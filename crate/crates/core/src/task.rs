//! Grounded STRIPS tasks and the transition function.

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::pddl::GroundAtom;

pub type AtomId = usize;
pub type ActionId = usize;

/// A set of atoms over a task's atom universe.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct State(FixedBitSet);

impl State {
    pub fn empty(universe: usize) -> Self {
        State(FixedBitSet::with_capacity(universe))
    }

    pub fn from_atoms(universe: usize, atoms: impl IntoIterator<Item = AtomId>) -> Self {
        let mut bits = FixedBitSet::with_capacity(universe);
        for a in atoms {
            bits.insert(a);
        }
        State(bits)
    }

    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, atom: AtomId) -> bool {
        self.0.contains(atom)
    }

    pub fn insert(&mut self, atom: AtomId) {
        self.0.insert(atom);
    }

    pub fn remove(&mut self, atom: AtomId) {
        self.0.set(atom, false);
    }

    pub fn contains_all(&self, atoms: &[AtomId]) -> bool {
        atoms.iter().all(|&a| self.0.contains(a))
    }

    pub fn is_superset(&self, other: &State) -> bool {
        self.0.is_superset(&other.0)
    }

    pub fn atoms(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.0.ones()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.ones()).finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundAction {
    /// Canonical `name obj1 obj2 ...`.
    pub signature: String,
    pub pre: Vec<AtomId>,
    pub add: Vec<AtomId>,
    pub del: Vec<AtomId>,
}

impl GroundAction {
    /// Builds an action in canonical form: sorted, deduplicated lists and
    /// any atom present in both `add` and `del` dropped from `del`.
    pub fn new(signature: impl Into<String>, pre: Vec<AtomId>, add: Vec<AtomId>, del: Vec<AtomId>) -> Self {
        let norm = |mut v: Vec<AtomId>| {
            v.sort_unstable();
            v.dedup();
            v
        };
        let pre = norm(pre);
        let add = norm(add);
        let del = norm(del).into_iter().filter(|d| add.binary_search(d).is_err()).collect();
        GroundAction { signature: signature.into(), pre, add, del }
    }

    /// The action name, i.e. the first token of the signature.
    pub fn name(&self) -> &str {
        self.signature.split(' ').next().unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApplyError {
    #[error("inapplicable action `{action}`: missing atoms {missing:?}")]
    Inapplicable { action: String, missing: Vec<AtomId> },
    #[error("inapplicable at step {step}: `{action}` is missing atoms {missing:?}")]
    InapplicableAt { step: usize, action: String, missing: Vec<AtomId> },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaskError {
    #[error("atom id {0} is outside the atom universe")]
    AtomOutOfRange(AtomId),
    #[error("duplicate action signature `{0}`")]
    DuplicateAction(String),
    #[error("duplicate atom `{0}`")]
    DuplicateAtom(String),
}

/// A grounded planning instance. Immutable once built.
#[derive(Debug, Clone)]
pub struct GroundTask {
    pub name: String,
    atoms: Vec<GroundAtom>,
    atom_index: HashMap<String, AtomId>,
    actions: Vec<GroundAction>,
    action_index: HashMap<String, ActionId>,
    init: State,
    goal: Vec<AtomId>,
}

impl PartialEq for GroundTask {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.atoms == other.atoms
            && self.actions == other.actions
            && self.init == other.init
            && self.goal == other.goal
    }
}

impl Eq for GroundTask {}

impl GroundTask {
    /// Assembles a task from already-numbered parts. Atom ids are indices
    /// into `atoms`; ids are not reassigned.
    pub fn new(
        name: impl Into<String>,
        atoms: Vec<GroundAtom>,
        actions: Vec<GroundAction>,
        init: impl IntoIterator<Item = AtomId>,
        goal: impl IntoIterator<Item = AtomId>,
    ) -> Result<Self, TaskError> {
        let n = atoms.len();
        let mut atom_index = HashMap::with_capacity(n);
        for (i, a) in atoms.iter().enumerate() {
            if atom_index.insert(a.signature(), i).is_some() {
                return Err(TaskError::DuplicateAtom(a.signature()));
            }
        }
        let check = |ids: &[AtomId]| match ids.iter().find(|&&a| a >= n) {
            Some(&a) => Err(TaskError::AtomOutOfRange(a)),
            None => Ok(()),
        };
        let mut action_index = HashMap::with_capacity(actions.len());
        for (i, a) in actions.iter().enumerate() {
            check(&a.pre)?;
            check(&a.add)?;
            check(&a.del)?;
            if action_index.insert(a.signature.clone(), i).is_some() {
                return Err(TaskError::DuplicateAction(a.signature.clone()));
            }
        }
        let init: Vec<AtomId> = init.into_iter().collect();
        check(&init)?;
        let mut goal: Vec<AtomId> = goal.into_iter().collect();
        check(&goal)?;
        goal.sort_unstable();
        goal.dedup();
        Ok(GroundTask {
            name: name.into(),
            atoms,
            atom_index,
            actions,
            action_index,
            init: State::from_atoms(n, init),
            goal,
        })
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[GroundAtom] {
        &self.atoms
    }

    pub fn atom(&self, id: AtomId) -> &GroundAtom {
        &self.atoms[id]
    }

    pub fn atom_id(&self, signature: &str) -> Option<AtomId> {
        self.atom_index.get(signature).copied()
    }

    pub fn actions(&self) -> &[GroundAction] {
        &self.actions
    }

    pub fn action(&self, id: ActionId) -> &GroundAction {
        &self.actions[id]
    }

    pub fn action_id(&self, signature: &str) -> Option<ActionId> {
        self.action_index.get(signature).copied()
    }

    pub fn init(&self) -> &State {
        &self.init
    }

    pub fn goal(&self) -> &[AtomId] {
        &self.goal
    }

    pub fn is_goal(&self, s: &State) -> bool {
        s.contains_all(&self.goal)
    }

    /// Builds a state from atom signatures; `None` if any signature is unknown.
    pub fn state_from(&self, signatures: &[&str]) -> Option<State> {
        let ids: Option<Vec<AtomId>> = signatures.iter().map(|s| self.atom_id(s)).collect();
        Some(State::from_atoms(self.num_atoms(), ids?))
    }

    /// Atom signatures of a state, in id order.
    pub fn describe(&self, s: &State) -> Vec<String> {
        s.atoms().map(|a| self.atoms[a].signature()).collect()
    }
}

/// `pre(a) ⊆ s`.
pub fn applicable(s: &State, a: &GroundAction) -> bool {
    s.contains_all(&a.pre)
}

/// `(s − del(a)) ∪ add(a)` without checking applicability.
pub fn successor(s: &State, a: &GroundAction) -> State {
    let mut next = s.clone();
    for &d in &a.del {
        next.remove(d);
    }
    for &p in &a.add {
        next.insert(p);
    }
    next
}

/// Applies `a` to `s`, failing with the missing precondition atoms.
pub fn apply(s: &State, a: &GroundAction) -> Result<State, ApplyError> {
    let missing: Vec<AtomId> = a.pre.iter().copied().filter(|&p| !s.contains(p)).collect();
    if !missing.is_empty() {
        return Err(ApplyError::Inapplicable { action: a.signature.clone(), missing });
    }
    Ok(successor(s, a))
}

/// Left fold of [`apply`] over `steps`, reporting the index of the first
/// inapplicable step.
pub fn apply_sequence(task: &GroundTask, s: &State, steps: &[ActionId]) -> Result<State, ApplyError> {
    let mut cur = s.clone();
    for (step, &id) in steps.iter().enumerate() {
        cur = apply(&cur, task.action(id)).map_err(|e| match e {
            ApplyError::Inapplicable { action, missing } => ApplyError::InapplicableAt { step, action, missing },
            other => other,
        })?;
    }
    Ok(cur)
}
