//! Forward best-first search.
//!
//! One engine serves both the plain A* baseline and the macro-enhanced
//! variant: with an empty macro list the two are the same code path.
//!
//! Ordering is by `f = g + h`, ties broken by larger `g` and then by
//! insertion order. Duplicate states keep the smaller `g`; a closed state
//! reached again with a strictly smaller `g` is reopened. The goal test
//! happens when a node is polled.

pub mod heuristic;

use std::cmp::Ordering;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::macros::Macro;
use crate::plan::Plan;
use crate::task::{applicable, successor, ActionId, GroundTask, State};

pub use heuristic::{FfHeuristic, Heuristic, HeuristicKind, ZeroHeuristic};

/// Rough per-node footprint used to turn a memory cap into a node cap.
pub const DEFAULT_NODE_BYTES: usize = 256;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Limits {
    pub timeout: Option<Duration>,
    /// Maximum number of generated nodes before reporting memory-out.
    pub node_cap: Option<usize>,
}

impl Limits {
    pub fn with_timeout(secs: f64) -> Self {
        Limits { timeout: Some(Duration::from_secs_f64(secs)), node_cap: None }
    }

    /// Combines an explicit node cap with a memory cap in megabytes.
    pub fn node_cap_from(node_cap: Option<usize>, memory_mb: Option<usize>, node_bytes: usize) -> Option<usize> {
        let from_mem = memory_mb.map(|mb| mb.saturating_mul(1 << 20) / node_bytes.max(1));
        match (node_cap, from_mem) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

/// Which macro intermediate states become search nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MacroSuccessors {
    /// Every state along the macro, `s¹ … sⁿ`.
    #[default]
    All,
    /// Only the state after the last step.
    Final,
}

impl fmt::Display for MacroSuccessors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MacroSuccessors::All => "all",
            MacroSuccessors::Final => "final",
        })
    }
}

impl FromStr for MacroSuccessors {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(MacroSuccessors::All),
            "final" => Ok(MacroSuccessors::Final),
            other => Err(format!("unknown macro-successors mode `{other}` (expected all or final)")),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SearchOptions {
    pub limits: Limits,
    pub macro_successors: MacroSuccessors,
    /// Keep the sequence of expanded states in [`SearchResult::trace`].
    pub record_trace: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Solved,
    Unsolvable,
    Timeout,
    MemoryOut,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Solved => "solved",
            Outcome::Unsolvable => "unsolvable",
            Outcome::Timeout => "timeout",
            Outcome::MemoryOut => "memory-out",
        })
    }
}

impl FromStr for Outcome {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "solved" => Ok(Outcome::Solved),
            "unsolvable" => Ok(Outcome::Unsolvable),
            "timeout" => Ok(Outcome::Timeout),
            "memory-out" => Ok(Outcome::MemoryOut),
            other => Err(format!("unknown outcome `{other}`")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub outcome: Outcome,
    pub plan: Option<Plan>,
    pub expanded: usize,
    pub generated: usize,
    pub seconds: f64,
    /// Macro applications during expansion.
    pub macro_applications: usize,
    /// Lengths of the macro edges on the returned solution path.
    pub macro_edges: Vec<usize>,
    pub trace: Option<Vec<State>>,
}

impl SearchResult {
    pub fn cost(&self) -> Option<usize> {
        self.plan.as_ref().map(Plan::cost)
    }

    /// `problem, outcome, cost, expanded, generated, seconds`
    pub fn record_line(&self, problem: &str) -> String {
        let cost = self.cost().map(|c| c.to_string()).unwrap_or_default();
        format!("{problem}, {}, {cost}, {}, {}, {:.6}", self.outcome, self.expanded, self.generated, self.seconds)
    }
}

#[derive(Debug, Clone, Copy)]
enum Edge {
    Root,
    Action(ActionId),
    /// First `len` steps of macro `index`.
    Macro {
        index: u32,
        len: u32,
    },
}

struct Node {
    state: u32,
    g: u32,
    parent: Option<u32>,
    edge: Edge,
}

struct StateInfo {
    best_g: u32,
    h: Option<u32>,
    closed: bool,
}

#[derive(PartialEq, Eq)]
struct QueueItem {
    f: u32,
    g: u32,
    seq: u64,
    node: u32,
}

impl Ord for QueueItem {
    // BinaryHeap is a max-heap: smallest f, then largest g, then smallest seq wins.
    fn cmp(&self, other: &Self) -> Ordering {
        other.f.cmp(&self.f).then(self.g.cmp(&other.g)).then(other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for QueueItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

enum Stop {
    MemoryOut,
}

struct Engine<'a> {
    task: &'a GroundTask,
    heuristic: &'a mut dyn Heuristic,
    node_cap: usize,
    states: Vec<State>,
    index: HashMap<State, u32>,
    info: Vec<StateInfo>,
    nodes: Vec<Node>,
    open: BinaryHeap<QueueItem>,
    seq: u64,
    generated: usize,
}

impl Engine<'_> {
    fn generate(&mut self, state: State, g: u32, parent: Option<u32>, edge: Edge) -> Result<(), Stop> {
        self.generated += 1;
        if self.generated > self.node_cap {
            return Err(Stop::MemoryOut);
        }
        let sid = match self.index.entry(state) {
            Entry::Occupied(e) => {
                let sid = *e.get();
                let info = &mut self.info[sid as usize];
                if g >= info.best_g {
                    return Ok(());
                }
                info.best_g = g;
                info.closed = false;
                sid
            }
            Entry::Vacant(e) => {
                let sid = self.states.len() as u32;
                let h = self.heuristic.estimate(e.key());
                self.states.push(e.key().clone());
                e.insert(sid);
                self.info.push(StateInfo { best_g: g, h, closed: false });
                sid
            }
        };
        let Some(h) = self.info[sid as usize].h else {
            return Ok(());
        };
        let node = self.nodes.len() as u32;
        self.nodes.push(Node { state: sid, g, parent, edge });
        self.open.push(QueueItem { f: g.saturating_add(h), g, seq: self.seq, node });
        self.seq += 1;
        Ok(())
    }

    fn extract(&self, macros: &[Macro], mut node: u32) -> (Plan, Vec<usize>) {
        let mut rev: Vec<ActionId> = Vec::new();
        let mut macro_edges = Vec::new();
        loop {
            let n = &self.nodes[node as usize];
            match n.edge {
                Edge::Root => break,
                Edge::Action(a) => rev.push(a),
                Edge::Macro { index, len } => {
                    let steps = &macros[index as usize].steps[..len as usize];
                    rev.extend(steps.iter().rev());
                    macro_edges.push(len as usize);
                }
            }
            node = n.parent.expect("non-root node has a parent");
        }
        rev.reverse();
        macro_edges.reverse();
        (Plan::from_ids(self.task, &rev), macro_edges)
    }
}

/// Runs the search from the task's initial state. `macros` are tried
/// before primitive actions at every expansion, in library order.
pub(crate) fn best_first(
    task: &GroundTask,
    macros: &[Macro],
    heuristic: &mut dyn Heuristic,
    opts: &SearchOptions,
) -> SearchResult {
    let start = Instant::now();
    let deadline = opts.limits.timeout.map(|t| start + t);
    let mut engine = Engine {
        task,
        heuristic,
        node_cap: opts.limits.node_cap.unwrap_or(usize::MAX),
        states: Vec::new(),
        index: HashMap::new(),
        info: Vec::new(),
        nodes: Vec::new(),
        open: BinaryHeap::new(),
        seq: 0,
        generated: 0,
    };
    let mut trace = opts.record_trace.then(Vec::new);
    let mut expanded = 0usize;
    let mut macro_applications = 0usize;
    let finish = |outcome, plan, macro_edges, engine: &Engine, expanded, macro_applications, trace| SearchResult {
        outcome,
        plan,
        expanded,
        generated: engine.generated,
        seconds: start.elapsed().as_secs_f64(),
        macro_applications,
        macro_edges,
        trace,
    };

    if engine.generate(task.init().clone(), 0, None, Edge::Root).is_err() {
        return finish(Outcome::MemoryOut, None, vec![], &engine, 0, 0, trace);
    }
    let mut polls = 0u32;
    let mut inter: Vec<State> = Vec::new();
    while let Some(item) = engine.open.pop() {
        polls = polls.wrapping_add(1);
        if polls.is_multiple_of(64) && deadline.is_some_and(|d| Instant::now() >= d) {
            return finish(Outcome::Timeout, None, vec![], &engine, expanded, macro_applications, trace);
        }
        let (sid, g) = {
            let n = &engine.nodes[item.node as usize];
            (n.state, n.g)
        };
        let info = &mut engine.info[sid as usize];
        if g > info.best_g || info.closed {
            continue;
        }
        let state = engine.states[sid as usize].clone();
        if task.is_goal(&state) {
            let (plan, edges) = engine.extract(macros, item.node);
            return finish(Outcome::Solved, Some(plan), edges, &engine, expanded, macro_applications, trace);
        }
        info.closed = true;
        expanded += 1;
        if let Some(t) = trace.as_mut() {
            t.push(state.clone());
        }

        let mut stop = Ok(());
        'macros: for (mi, m) in macros.iter().enumerate() {
            inter.clear();
            let mut cur = &state;
            for &step in &m.steps {
                let action = task.action(step);
                if !applicable(cur, action) {
                    continue 'macros;
                }
                inter.push(successor(cur, action));
                cur = inter.last().unwrap();
            }
            macro_applications += 1;
            let n = inter.len();
            let first = match opts.macro_successors {
                MacroSuccessors::All => 0,
                MacroSuccessors::Final => n - 1,
            };
            for (k, s) in inter.drain(..).enumerate().skip(first) {
                let len = k as u32 + 1;
                stop = engine.generate(s, g + len, Some(item.node), Edge::Macro { index: mi as u32, len });
                if stop.is_err() {
                    break 'macros;
                }
            }
        }
        if stop.is_ok() {
            for (aid, action) in task.actions().iter().enumerate() {
                if applicable(&state, action) {
                    stop = engine.generate(successor(&state, action), g + 1, Some(item.node), Edge::Action(aid));
                    if stop.is_err() {
                        break;
                    }
                }
            }
        }
        if let Err(Stop::MemoryOut) = stop {
            return finish(Outcome::MemoryOut, None, vec![], &engine, expanded, macro_applications, trace);
        }
    }
    finish(Outcome::Unsolvable, None, vec![], &engine, expanded, macro_applications, trace)
}

/// Plain A* over primitive actions.
pub fn astar(task: &GroundTask, heuristic: &mut dyn Heuristic, opts: &SearchOptions) -> SearchResult {
    best_first(task, &[], heuristic, opts)
}
