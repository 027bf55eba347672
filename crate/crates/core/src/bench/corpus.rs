//! Plan corpora: baseline solutions of training problems, their plan
//! files, and the sequence database built from them.

use std::fs;
use std::path::Path;

use super::{run_all, BenchError, Instance, RunSettings};
use crate::mining::{build_labelled_sequence_db, SequenceDatabase};
use crate::plan::Plan;
use crate::search::{astar, Outcome, SearchOptions, SearchResult};

pub const PLAN_EXTENSION: &str = "plan";
pub const SPMF_FILE: &str = "corpus.spmf";
pub const DICTIONARY_FILE: &str = "corpus.dict";

#[derive(Debug, Clone)]
pub struct Corpus {
    /// Solved problems and their plans, in problem order.
    pub plans: Vec<(String, Plan)>,
    /// Problems left out, with the reason.
    pub excluded: Vec<(String, String)>,
    pub db: SequenceDatabase,
}

fn baseline(instance: &Instance, settings: &RunSettings) -> SearchResult {
    let mut h = settings.heuristic.build(&instance.task);
    let opts = SearchOptions { limits: settings.limits, ..Default::default() };
    astar(&instance.task, h.as_mut(), &opts)
}

/// Solves each training problem with the baseline planner and encodes the
/// non-empty plans. Unsolved problems are excluded, not fatal.
pub fn build_corpus(instances: &[Instance], settings: &RunSettings) -> Result<Corpus, BenchError> {
    let results = run_all(instances, settings.single_thread, |inst| baseline(inst, settings));
    let mut plans = Vec::new();
    let mut excluded = Vec::new();
    for (inst, r) in instances.iter().zip(results) {
        match (r.outcome, r.plan) {
            (Outcome::Solved, Some(p)) if !p.is_empty() => plans.push((inst.name.clone(), p)),
            (Outcome::Solved, _) => excluded.push((inst.name.clone(), "goal holds initially".to_string())),
            (outcome, _) => excluded.push((inst.name.clone(), outcome.to_string())),
        }
    }
    if plans.is_empty() {
        return Err(BenchError::NothingSolved { attempted: instances.len() });
    }
    let db = corpus_db(&plans)?;
    Ok(Corpus { plans, excluded, db })
}

fn corpus_db(plans: &[(String, Plan)]) -> Result<SequenceDatabase, BenchError> {
    let labels = plans.iter().map(|(n, _)| n.clone()).collect();
    let steps: Vec<Plan> = plans.iter().map(|(_, p)| p.clone()).collect();
    Ok(build_labelled_sequence_db(&steps, labels)?)
}

/// Writes `<problem>.plan` for each plan plus the SPMF encoding and its dictionary.
pub fn write_corpus(corpus: &Corpus, dir: &Path) -> Result<(), BenchError> {
    fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
    for (name, plan) in &corpus.plans {
        let path = dir.join(format!("{name}.{PLAN_EXTENSION}"));
        fs::write(&path, plan.to_text()).map_err(|e| BenchError::io(&path, e))?;
    }
    let (seq, dict) = corpus.db.to_spmf();
    for (file, text) in [(SPMF_FILE, seq), (DICTIONARY_FILE, dict)] {
        let path = dir.join(file);
        fs::write(&path, text).map_err(|e| BenchError::io(&path, e))?;
    }
    Ok(())
}

/// Reads every `*.plan` file in `dir`, sorted by file name, labelled by file stem.
pub fn read_plan_dir(dir: &Path) -> Result<Vec<(String, Plan)>, BenchError> {
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(|e| BenchError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == PLAN_EXTENSION))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|path| {
            let text = fs::read_to_string(&path).map_err(|e| BenchError::io(&path, e))?;
            let plan = Plan::parse(&text).map_err(|source| BenchError::PlanFile { path: path.clone(), source })?;
            let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            Ok((name, plan))
        })
        .collect()
}

/// Sequence database over a plan directory.
pub fn load_plan_corpus(dir: &Path) -> Result<SequenceDatabase, BenchError> {
    corpus_db(&read_plan_dir(dir)?)
}
