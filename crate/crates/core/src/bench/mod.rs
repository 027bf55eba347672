//! Benchmark plumbing: problem generation, plan corpora, support sweeps
//! and IPC scoring.

pub mod corpus;
pub mod generate;
pub mod report;
pub mod score;
pub mod sweep;

use std::path::PathBuf;

use thiserror::Error;

use crate::mining::{ConfigError, CorpusError};
use crate::pddl::{parse_domain, parse_problem};
use crate::plan::PlanParseError;
use crate::search::{HeuristicKind, Limits, MacroSuccessors};
use crate::task::GroundTask;
use crate::{ground, LoadError};

pub use corpus::{build_corpus, read_plan_dir, write_corpus, Corpus};
pub use generate::{
    generate_problems, generate_suite, BenchmarkSuite, DomainKind, GenerateError, GeneratedProblem, SizeParams,
};
pub use score::{gain, quality_score, score_runs, time_score, RunRecord, ScoreReport};
pub use sweep::{sweep, StopReason, SweepConfig, SweepPoint, SweepResult};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("problem `{problem}`: {source}")]
    Load { problem: String, source: LoadError },
    #[error("no training problem was solved ({attempted} attempted); the corpus would be empty")]
    NothingSolved { attempted: usize },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Mining(#[from] ConfigError),
    #[error("{0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    PlanFile { path: PathBuf, source: PlanParseError },
    #[error("run table: {0}")]
    Table(String),
    #[error(transparent)]
    Generate(#[from] GenerateError),
}

impl BenchError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        BenchError::Io { path: path.into(), source }
    }
}

/// A named, grounded problem.
#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub task: GroundTask,
}

/// Parses the domain once and grounds every `(name, text)` problem against it.
pub fn load_instances(domain_text: &str, problems: &[(String, String)]) -> Result<Vec<Instance>, BenchError> {
    let err = |problem: &str, source| BenchError::Load { problem: problem.to_string(), source };
    let domain = parse_domain(domain_text).map_err(|e| err("<domain>", LoadError::Domain(e)))?;
    problems
        .iter()
        .map(|(name, text)| {
            let p = parse_problem(text, &domain).map_err(|e| err(name, LoadError::Problem(e)))?;
            let task = ground(&domain, &p).map_err(|e| err(name, LoadError::Ground(e)))?;
            Ok(Instance { name: name.clone(), task })
        })
        .collect()
}

/// Loads generated problems of a bundled domain.
pub fn load_generated(domain: DomainKind, problems: &[GeneratedProblem]) -> Result<Vec<Instance>, BenchError> {
    let pairs: Vec<(String, String)> = problems.iter().map(|p| (p.name.clone(), p.text.clone())).collect();
    load_instances(domain.domain_pddl(), &pairs)
}

/// Search settings shared by corpus building and sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    pub limits: Limits,
    pub heuristic: HeuristicKind,
    pub macro_successors: MacroSuccessors,
    /// Run problems one after another instead of on the thread pool.
    pub single_thread: bool,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            limits: Limits::with_timeout(60.0),
            heuristic: HeuristicKind::Ff,
            macro_successors: MacroSuccessors::All,
            single_thread: false,
        }
    }
}

/// Maps `f` over `items`, in order, on the rayon pool unless `single_thread`.
pub(crate) fn run_all<T: Sync, R: Send>(items: &[T], single_thread: bool, f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    if single_thread {
        items.iter().map(f).collect()
    } else {
        items.par_iter().map(f).collect()
    }
}
