//! Random instance generators and brute-force oracles shared by the
//! integration tests and the acceptance suite. The oracles work on plain
//! `BTreeSet`s and raw add/delete lists, not on the library's types.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use macroforge::mining::{ActionDictionary, ItemId, SequenceDatabase};
use macroforge::pddl::GroundAtom;
use macroforge::{GroundAction, GroundTask, State};
use rand::seq::SliceRandom;
use rand::Rng;

pub type AtomSet = BTreeSet<usize>;

/// Action lists exactly as drawn, before any normalisation.
#[derive(Debug, Clone)]
pub struct RawAction {
    pub pre: Vec<usize>,
    pub add: Vec<usize>,
    pub del: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct RandomTask {
    pub task: GroundTask,
    pub raw: Vec<RawAction>,
    pub init: AtomSet,
    pub goal: AtomSet,
}

pub fn subset(rng: &mut impl Rng, n: usize, max: usize) -> Vec<usize> {
    let k = rng.gen_range(0..=max.min(n));
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(rng);
    all.truncate(k);
    all
}

/// A propositional task with `atoms` atoms `p0..` and `actions` actions `a0..`.
/// Add and delete lists may overlap.
pub fn random_task(rng: &mut impl Rng, atoms: usize, actions: usize) -> RandomTask {
    let atom_list: Vec<GroundAtom> =
        (0..atoms).map(|i| GroundAtom { predicate: format!("p{i}"), args: Vec::new() }).collect();
    let raw: Vec<RawAction> = (0..actions)
        .map(|_| {
            let mut add = subset(rng, atoms, 3);
            if add.is_empty() {
                add.push(rng.gen_range(0..atoms));
            }
            RawAction { pre: subset(rng, atoms, 2), add, del: subset(rng, atoms, 2) }
        })
        .collect();
    let ground: Vec<GroundAction> = raw
        .iter()
        .enumerate()
        .map(|(i, r)| GroundAction::new(format!("a{i}"), r.pre.clone(), r.add.clone(), r.del.clone()))
        .collect();
    let init: AtomSet = subset(rng, atoms, atoms / 2).into_iter().collect();
    // Goals mostly avoid the initial atoms so that plans are not trivial.
    let mut outside: Vec<usize> = (0..atoms).filter(|a| !init.contains(a)).collect();
    outside.shuffle(rng);
    let mut goal: AtomSet = outside.into_iter().take(rng.gen_range(1..=3)).collect();
    if goal.is_empty() || rng.gen_bool(0.2) {
        goal.insert(rng.gen_range(0..atoms));
    }
    let task = GroundTask::new("random", atom_list, ground, init.iter().copied(), goal.iter().copied()).unwrap();
    RandomTask { task, raw, init, goal }
}

pub fn random_state(rng: &mut impl Rng, atoms: usize) -> AtomSet {
    (0..atoms).filter(|_| rng.gen_bool(0.5)).collect()
}

pub fn to_state(universe: usize, s: &AtomSet) -> State {
    State::from_atoms(universe, s.iter().copied())
}

pub fn to_set(s: &State) -> AtomSet {
    s.atoms().collect()
}

/// `(s − del) ∪ add`, or `None` if a precondition is missing.
pub fn oracle_step(s: &AtomSet, a: &RawAction) -> Option<AtomSet> {
    if !a.pre.iter().all(|p| s.contains(p)) {
        return None;
    }
    let mut next: AtomSet = s.iter().copied().filter(|x| !a.del.contains(x)).collect();
    next.extend(a.add.iter().copied());
    Some(next)
}

/// Breadth-first search over the oracle semantics: every reachable state
/// with its distance from the initial state.
pub fn reachable(rt: &RandomTask) -> BTreeMap<AtomSet, usize> {
    let mut dist = BTreeMap::new();
    dist.insert(rt.init.clone(), 0);
    let mut queue = VecDeque::from([rt.init.clone()]);
    while let Some(s) = queue.pop_front() {
        let d = dist[&s];
        for a in &rt.raw {
            if let Some(t) = oracle_step(&s, a) {
                if !dist.contains_key(&t) {
                    dist.insert(t.clone(), d + 1);
                    queue.push_back(t);
                }
            }
        }
    }
    dist
}

pub fn optimal_cost(rt: &RandomTask) -> Option<usize> {
    reachable(rt).into_iter().filter(|(s, _)| rt.goal.is_subset(s)).map(|(_, d)| d).min()
}

/// Replays `steps` (signatures `a<i>`) from the initial state with the oracle.
pub fn oracle_valid(rt: &RandomTask, steps: &[String]) -> bool {
    let mut s = rt.init.clone();
    for sig in steps {
        let Some(i) = sig.strip_prefix('a').and_then(|n| n.parse::<usize>().ok()) else { return false };
        let Some(a) = rt.raw.get(i) else { return false };
        match oracle_step(&s, a) {
            Some(t) => s = t,
            None => return false,
        }
    }
    rt.goal.is_subset(&s)
}

pub fn random_sequences(rng: &mut impl Rng, max_seqs: usize, max_len: usize, alphabet: u32) -> Vec<Vec<ItemId>> {
    let n = rng.gen_range(1..=max_seqs);
    (0..n)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            (0..len).map(|_| rng.gen_range(1..=alphabet)).collect()
        })
        .collect()
}

/// Wraps raw item sequences with a dictionary `i1..ik`.
pub fn database(sequences: Vec<Vec<ItemId>>, alphabet: u32) -> SequenceDatabase {
    let dict = ActionDictionary::from_signatures((1..=alphabet).map(|i| format!("i{i}")));
    let labels = (0..sequences.len()).map(|i| format!("s{i}")).collect();
    SequenceDatabase::new(sequences, dict, labels).unwrap()
}

/// Smallest count that is at least `percent`% of `n`, and at least 1.
pub fn percent_threshold(percent: u32, n: usize) -> usize {
    ((percent as usize * n).div_ceil(100)).max(1)
}

fn contains_run(hay: &[ItemId], needle: &[ItemId]) -> bool {
    hay.windows(needle.len()).any(|w| w == needle)
}

/// Every frequent contiguous run with no frequent strict super-run,
/// by enumerating all substrings.
pub fn oracle_maximal(sequences: &[Vec<ItemId>], threshold: usize) -> BTreeSet<(Vec<ItemId>, usize)> {
    let mut support: HashMap<Vec<ItemId>, usize> = HashMap::new();
    for seq in sequences {
        let mut seen = BTreeSet::new();
        for i in 0..seq.len() {
            for j in i + 1..=seq.len() {
                seen.insert(seq[i..j].to_vec());
            }
        }
        for run in seen {
            *support.entry(run).or_default() += 1;
        }
    }
    let frequent: Vec<(&Vec<ItemId>, usize)> =
        support.iter().filter(|(_, &c)| c >= threshold).map(|(p, &c)| (p, c)).collect();
    frequent
        .iter()
        .filter(|(p, _)| !frequent.iter().any(|(q, _)| q.len() > p.len() && contains_run(q, p)))
        .map(|(p, c)| ((*p).clone(), *c))
        .collect()
}
