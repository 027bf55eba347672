//! Random problem generators for the bundled domains.
//!
//! Goals are random configurations of the same objects, so every
//! generated problem is solvable. Object names are fixed per size
//! (`b1..bn`, `c1..`, `l1..`, ...) so ground action signatures line up
//! across problems of one suite.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub const BLOCKSWORLD_DOMAIN: &str = include_str!("../../domains/blocksworld.pddl");
pub const FERRY_DOMAIN: &str = include_str!("../../domains/ferry.pddl");
pub const GRIPPER_DOMAIN: &str = include_str!("../../domains/gripper.pddl");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainKind {
    Blocksworld,
    Ferry,
    Gripper,
}

impl DomainKind {
    pub const ALL: [DomainKind; 3] = [DomainKind::Blocksworld, DomainKind::Ferry, DomainKind::Gripper];

    pub fn domain_pddl(self) -> &'static str {
        match self {
            DomainKind::Blocksworld => BLOCKSWORLD_DOMAIN,
            DomainKind::Ferry => FERRY_DOMAIN,
            DomainKind::Gripper => GRIPPER_DOMAIN,
        }
    }

    fn short(self) -> &'static str {
        match self {
            DomainKind::Blocksworld => "bw",
            DomainKind::Ferry => "ferry",
            DomainKind::Gripper => "gripper",
        }
    }
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainKind::Blocksworld => "blocksworld",
            DomainKind::Ferry => "ferry",
            DomainKind::Gripper => "gripper",
        })
    }
}

impl FromStr for DomainKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "blocksworld" => Ok(DomainKind::Blocksworld),
            "ferry" => Ok(DomainKind::Ferry),
            "gripper" => Ok(DomainKind::Gripper),
            other => Err(format!("unknown domain `{other}` (expected blocksworld, ferry or gripper)")),
        }
    }
}

/// Instance sizes. Only the fields of the chosen domain are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeParams {
    pub blocks: usize,
    pub cars: usize,
    pub locations: usize,
    pub balls: usize,
    pub rooms: usize,
}

impl Default for SizeParams {
    fn default() -> Self {
        SizeParams { blocks: 5, cars: 3, locations: 3, balls: 4, rooms: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("invalid size: {0}")]
    InvalidParams(String),
    #[error("could only find {found} distinct problems of the requested size, {wanted} requested")]
    NotEnoughDistinct { found: usize, wanted: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedProblem {
    pub name: String,
    pub text: String,
}

/// Training and test problems of one domain; no problem appears in both.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchmarkSuite {
    pub domain: DomainKind,
    pub size: SizeParams,
    pub training: Vec<GeneratedProblem>,
    pub test: Vec<GeneratedProblem>,
    pub seed: u64,
}

/// Init and goal atoms of one instance, before naming.
struct Instance {
    objects: String,
    init: Vec<String>,
    goal: Vec<String>,
}

impl Instance {
    fn key(&self) -> String {
        format!("{}|{}", self.init.join(","), self.goal.join(","))
    }

    fn render(&self, name: &str, domain: DomainKind) -> String {
        let atoms = |v: &[String]| v.iter().map(|a| format!("({a})")).collect::<Vec<_>>().join(" ");
        format!(
            "(define (problem {name})\n  (:domain {domain})\n  (:objects {})\n  (:init {})\n  (:goal (and {})))\n",
            self.objects,
            atoms(&self.init),
            atoms(&self.goal)
        )
    }
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Random stacking of `blocks` into towers, each listed bottom to top.
fn random_towers(rng: &mut ChaCha8Rng, blocks: &[String]) -> Vec<Vec<String>> {
    let mut order = blocks.to_vec();
    order.shuffle(rng);
    let mut towers: Vec<Vec<String>> = Vec::new();
    for b in order {
        let slot = rng.gen_range(0..=towers.len());
        match towers.get_mut(slot) {
            Some(t) => t.push(b),
            None => towers.push(vec![b]),
        }
    }
    towers
}

fn tower_atoms(towers: &[Vec<String>]) -> Vec<String> {
    let mut atoms = Vec::new();
    for t in towers {
        atoms.push(format!("ontable {}", t[0]));
        for w in t.windows(2) {
            atoms.push(format!("on {} {}", w[1], w[0]));
        }
        atoms.push(format!("clear {}", t[t.len() - 1]));
    }
    atoms.sort();
    atoms
}

fn blocksworld(rng: &mut ChaCha8Rng, size: &SizeParams) -> Instance {
    let blocks = names("b", size.blocks);
    let mut init = tower_atoms(&random_towers(rng, &blocks));
    init.push("handempty".into());
    init.sort();
    let goal: Vec<String> =
        tower_atoms(&random_towers(rng, &blocks)).into_iter().filter(|a| !a.starts_with("clear")).collect();
    Instance { objects: blocks.join(" "), init, goal }
}

fn ferry(rng: &mut ChaCha8Rng, size: &SizeParams) -> Instance {
    let cars = names("c", size.cars);
    let locs = names("l", size.locations);
    let mut init = vec![format!("at-ferry {}", locs.choose(rng).unwrap()), "empty-ferry".to_string()];
    let mut goal = Vec::new();
    for c in &cars {
        init.push(format!("at {c} {}", locs.choose(rng).unwrap()));
        goal.push(format!("at {c} {}", locs.choose(rng).unwrap()));
    }
    init.sort();
    goal.sort();
    Instance { objects: format!("{} - car {} - location", cars.join(" "), locs.join(" ")), init, goal }
}

fn gripper(rng: &mut ChaCha8Rng, size: &SizeParams) -> Instance {
    let balls = names("ball", size.balls);
    let rooms = names("room", size.rooms);
    let mut init =
        vec![format!("at-robby {}", rooms.choose(rng).unwrap()), "free left".to_string(), "free right".to_string()];
    let mut goal = Vec::new();
    for b in &balls {
        init.push(format!("at {b} {}", rooms.choose(rng).unwrap()));
        goal.push(format!("at {b} {}", rooms.choose(rng).unwrap()));
    }
    init.sort();
    goal.sort();
    Instance {
        objects: format!("{} - ball {} - room left right - gripper", balls.join(" "), rooms.join(" ")),
        init,
        goal,
    }
}

fn validate(domain: DomainKind, size: &SizeParams) -> Result<(), GenerateError> {
    let bad = |m: &str| Err(GenerateError::InvalidParams(m.to_string()));
    match domain {
        DomainKind::Blocksworld if size.blocks < 2 => bad("blocksworld needs at least 2 blocks to stack"),
        DomainKind::Ferry if size.cars < 1 => bad("ferry needs at least 1 car"),
        DomainKind::Ferry if size.locations < 2 => bad("ferry needs at least 2 locations"),
        DomainKind::Gripper if size.balls < 1 => bad("gripper needs at least 1 ball"),
        DomainKind::Gripper if size.rooms < 2 => bad("gripper needs at least 2 rooms"),
        _ => Ok(()),
    }
}

/// Draws `count` distinct instances whose goal does not already hold initially.
fn draw(domain: DomainKind, size: &SizeParams, count: usize, seed: u64) -> Result<Vec<Instance>, GenerateError> {
    validate(domain, size)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(count);
    let max_attempts = 1000 + count * 200;
    for _ in 0..max_attempts {
        if out.len() == count {
            break;
        }
        let inst = match domain {
            DomainKind::Blocksworld => blocksworld(&mut rng, size),
            DomainKind::Ferry => ferry(&mut rng, size),
            DomainKind::Gripper => gripper(&mut rng, size),
        };
        let trivial = inst.goal.iter().all(|g| inst.init.contains(g));
        if !trivial && seen.insert(inst.key()) {
            out.push(inst);
        }
    }
    if out.len() < count {
        return Err(GenerateError::NotEnoughDistinct { found: out.len(), wanted: count });
    }
    Ok(out)
}

/// `count` distinct solvable problems, named `<domain>-<nnn>`.
pub fn generate_problems(
    domain: DomainKind,
    size: &SizeParams,
    count: usize,
    seed: u64,
) -> Result<Vec<GeneratedProblem>, GenerateError> {
    let instances = draw(domain, size, count, seed)?;
    Ok(instances
        .iter()
        .enumerate()
        .map(|(i, inst)| {
            let name = format!("{}-{:03}", domain.short(), i + 1);
            GeneratedProblem { text: inst.render(&name, domain), name }
        })
        .collect())
}

/// Disjoint training and test sets drawn from one seeded stream.
pub fn generate_suite(
    domain: DomainKind,
    size: &SizeParams,
    training: usize,
    test: usize,
    seed: u64,
) -> Result<BenchmarkSuite, GenerateError> {
    let instances = draw(domain, size, training + test, seed)?;
    let named = |(i, inst): (usize, &Instance), set: &str| {
        let name = format!("{}-{set}-{:03}", domain.short(), i + 1);
        GeneratedProblem { text: inst.render(&name, domain), name }
    };
    Ok(BenchmarkSuite {
        domain,
        size: *size,
        training: instances[..training].iter().enumerate().map(|p| named(p, "train")).collect(),
        test: instances[training..].iter().enumerate().map(|p| named(p, "test")).collect(),
        seed,
    })
}
