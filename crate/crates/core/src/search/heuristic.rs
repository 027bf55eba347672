//! State heuristics: the relaxed-plan (FF) estimate and the blind zero heuristic.

use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;

use crate::task::{ActionId, AtomId, GroundTask, State};

/// A state evaluator. `None` means the goal is unreachable from the state.
pub trait Heuristic {
    fn estimate(&mut self, s: &State) -> Option<u32>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroHeuristic;

impl Heuristic for ZeroHeuristic {
    fn estimate(&mut self, _: &State) -> Option<u32> {
        Some(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeuristicKind {
    #[default]
    Ff,
    Zero,
}

impl HeuristicKind {
    pub fn build<'t>(self, task: &'t GroundTask) -> Box<dyn Heuristic + 't> {
        match self {
            HeuristicKind::Ff => Box::new(FfHeuristic::new(task)),
            HeuristicKind::Zero => Box::new(ZeroHeuristic),
        }
    }
}

impl fmt::Display for HeuristicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HeuristicKind::Ff => "ff",
            HeuristicKind::Zero => "zero",
        })
    }
}

impl FromStr for HeuristicKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ff" => Ok(HeuristicKind::Ff),
            "zero" => Ok(HeuristicKind::Zero),
            other => Err(format!("unknown heuristic `{other}` (expected ff or zero)")),
        }
    }
}

const UNREACHED: u32 = u32::MAX;

/// Relaxed planning graph heuristic.
///
/// The graph is built layer by layer ignoring delete lists. A relaxed plan
/// is then extracted backwards: goals are handled from the deepest layer
/// down, each one supported by the lowest-id action that first becomes
/// applicable in the layer just below it. The add effects of a chosen
/// action count as achieved at its own layer and the one after it. The
/// estimate is the number of chosen actions.
pub struct FfHeuristic<'t> {
    task: &'t GroundTask,
    /// For each atom, the actions that list it as a precondition.
    consumers: Vec<Vec<ActionId>>,
    /// For each atom, the actions adding it, ascending by id.
    achievers: Vec<Vec<ActionId>>,
    no_pre: Vec<ActionId>,
    atom_level: Vec<u32>,
    action_level: Vec<u32>,
    counter: Vec<u32>,
}

impl<'t> FfHeuristic<'t> {
    pub fn new(task: &'t GroundTask) -> Self {
        let n = task.num_atoms();
        let mut consumers = vec![Vec::new(); n];
        let mut achievers = vec![Vec::new(); n];
        let mut no_pre = Vec::new();
        for (id, a) in task.actions().iter().enumerate() {
            for &p in &a.pre {
                consumers[p].push(id);
            }
            for &q in &a.add {
                achievers[q].push(id);
            }
            if a.pre.is_empty() {
                no_pre.push(id);
            }
        }
        FfHeuristic {
            task,
            consumers,
            achievers,
            no_pre,
            atom_level: vec![UNREACHED; n],
            action_level: vec![UNREACHED; task.actions().len()],
            counter: vec![0; task.actions().len()],
        }
    }

    /// Fills `atom_level` / `action_level`. Returns the deepest goal layer,
    /// or `None` if some goal never appears.
    fn build_graph(&mut self, s: &State) -> Option<u32> {
        let task = self.task;
        self.atom_level.fill(UNREACHED);
        self.action_level.fill(UNREACHED);
        for (c, a) in self.counter.iter_mut().zip(task.actions()) {
            *c = a.pre.len() as u32;
        }

        let mut layer: Vec<AtomId> = s.atoms().collect();
        for &p in &layer {
            self.atom_level[p] = 0;
        }
        let mut ready: Vec<ActionId> = self.no_pre.clone();
        for &a in &ready {
            self.action_level[a] = 0;
        }
        let mut goals_left = task.goal().iter().filter(|&&g| !s.contains(g)).count();
        let mut level = 0u32;
        loop {
            for &p in &layer {
                for &a in &self.consumers[p] {
                    self.counter[a] -= 1;
                    if self.counter[a] == 0 {
                        self.action_level[a] = level;
                        ready.push(a);
                    }
                }
            }
            if goals_left == 0 {
                break;
            }
            let mut next = Vec::new();
            for &a in &ready {
                for &q in &task.action(a).add {
                    if self.atom_level[q] == UNREACHED {
                        self.atom_level[q] = level + 1;
                        next.push(q);
                    }
                }
            }
            ready.clear();
            if next.is_empty() {
                return None;
            }
            goals_left -= next.iter().filter(|q| task.goal().binary_search(q).is_ok()).count();
            layer = next;
            level += 1;
        }
        Some(task.goal().iter().map(|&g| self.atom_level[g]).max().unwrap_or(0))
    }

    fn extract(&self, depth: u32) -> u32 {
        let task = self.task;
        let n = task.num_atoms();
        let layers = depth as usize + 1;
        let mut goals: Vec<FixedBitSet> = vec![FixedBitSet::with_capacity(n); layers];
        let mut marked: Vec<FixedBitSet> = vec![FixedBitSet::with_capacity(n); layers];
        for &g in task.goal() {
            let l = self.atom_level[g] as usize;
            if l > 0 {
                goals[l].insert(g);
            }
        }
        let mut count = 0;
        for i in (1..layers).rev() {
            let pending: Vec<AtomId> = goals[i].ones().collect();
            for g in pending {
                if marked[i].contains(g) {
                    continue;
                }
                let want = (i - 1) as u32;
                let a = *self.achievers[g]
                    .iter()
                    .find(|&&a| self.action_level[a] == want)
                    .expect("atom at layer i has an achiever at layer i-1");
                count += 1;
                let action = task.action(a);
                for &p in &action.pre {
                    let lp = self.atom_level[p] as usize;
                    if lp != 0 && !marked[i - 1].contains(p) {
                        goals[lp].insert(p);
                    }
                }
                for &q in &action.add {
                    marked[i].insert(q);
                    marked[i - 1].insert(q);
                }
            }
        }
        count
    }
}

impl Heuristic for FfHeuristic<'_> {
    fn estimate(&mut self, s: &State) -> Option<u32> {
        if self.task.is_goal(s) {
            return Some(0);
        }
        let depth = self.build_graph(s)?;
        Some(self.extract(depth))
    }
}
