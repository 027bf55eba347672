//! IPC time and quality scores, per-problem references, and relative gains.
//!
//! * time score `T*/T`, quality score `Q*/Q`;
//! * an unsolved run scores 0 on both;
//! * `T*` and `Q*` are the best values over every evaluated configuration;
//! * gain is `(Σ candidate − Σ baseline) / Σ baseline × 100` over the
//!   aggregated scores of one configuration.

use std::collections::BTreeMap;
use std::fmt;

use crate::search::Outcome;

/// Times below this are treated as this, so ratios stay finite.
pub const CLOCK_RESOLUTION_SECS: f64 = 1e-6;

pub const BASELINE: &str = "baseline";
pub const MACROS: &str = "macros";

/// `T*/T`, or 0 if the run did not solve the problem.
pub fn time_score(best: f64, run: Option<f64>) -> f64 {
    match run {
        None => 0.0,
        Some(t) => {
            let t = t.max(CLOCK_RESOLUTION_SECS);
            let best = best.max(CLOCK_RESOLUTION_SECS);
            (best / t).min(1.0)
        }
    }
}

/// `Q*/Q`, or 0 if the run did not solve the problem. Two empty plans score 1.
pub fn quality_score(best: usize, run: Option<usize>) -> f64 {
    match run {
        None => 0.0,
        Some(0) => 1.0,
        Some(q) => (best as f64 / q as f64).min(1.0),
    }
}

/// Relative gain in percent; `None` when the baseline aggregate is zero.
pub fn gain(baseline: f64, candidate: f64) -> Option<f64> {
    if baseline == 0.0 {
        None
    } else {
        Some((candidate - baseline) / baseline * 100.0)
    }
}

/// One (problem, configuration) search run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    /// `None` for the baseline.
    pub minsup: Option<f64>,
    pub problem: String,
    pub config: String,
    pub outcome: Outcome,
    pub cost: Option<usize>,
    pub seconds: f64,
    pub expanded: usize,
    /// Macros encoded for this problem (0 for the baseline).
    pub macros: usize,
    /// Macro edges on the solution path.
    pub macro_edges: usize,
}

impl RunRecord {
    pub fn solved(&self) -> bool {
        self.outcome == Outcome::Solved
    }
}

/// Identifies one evaluated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigKey {
    pub config: String,
    pub minsup: Option<f64>,
}

impl ConfigKey {
    pub fn baseline() -> Self {
        ConfigKey { config: BASELINE.into(), minsup: None }
    }
}

impl fmt::Display for ConfigKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.minsup {
            Some(m) => write!(f, "{}@{}", self.config, m),
            None => f.write_str(&self.config),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reference {
    pub best_time: Option<f64>,
    pub best_cost: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredRun {
    pub record: RunRecord,
    pub time_score: f64,
    pub quality_score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub key: ConfigKey,
    pub runs: usize,
    pub solved: usize,
    pub time_sum: f64,
    pub quality_sum: f64,
    /// Against the baseline aggregate; `None` if that is zero.
    pub time_gain: Option<f64>,
    pub quality_gain: Option<f64>,
}

impl Aggregate {
    pub fn empty(key: ConfigKey) -> Self {
        Aggregate { key, runs: 0, solved: 0, time_sum: 0.0, quality_sum: 0.0, time_gain: None, quality_gain: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub runs: Vec<ScoredRun>,
    pub references: BTreeMap<String, Reference>,
    /// One entry per configuration, in first-seen order.
    pub aggregates: Vec<Aggregate>,
}

impl ScoreReport {
    pub fn aggregate(&self, key: &ConfigKey) -> Option<&Aggregate> {
        self.aggregates.iter().find(|a| a.key == *key)
    }
}

/// Best solved time and cost per problem over all records.
pub fn references(records: &[RunRecord]) -> BTreeMap<String, Reference> {
    let mut refs: BTreeMap<String, Reference> = BTreeMap::new();
    for r in records {
        let e = refs.entry(r.problem.clone()).or_insert(Reference { best_time: None, best_cost: None });
        if r.solved() {
            e.best_time = Some(e.best_time.map_or(r.seconds, |b| b.min(r.seconds)));
            if let Some(c) = r.cost {
                e.best_cost = Some(e.best_cost.map_or(c, |b| b.min(c)));
            }
        }
    }
    refs
}

/// Scores every record against the per-problem references.
pub fn score_runs(records: Vec<RunRecord>) -> ScoreReport {
    let refs = references(&records);
    let runs: Vec<ScoredRun> = records
        .into_iter()
        .map(|record| {
            let reference = refs[&record.problem];
            let solved = record.solved();
            let time_score =
                time_score(reference.best_time.unwrap_or(record.seconds), solved.then_some(record.seconds));
            let quality_score =
                quality_score(reference.best_cost.unwrap_or(0), if solved { record.cost } else { None });
            ScoredRun { record, time_score, quality_score }
        })
        .collect();

    let mut aggregates: Vec<Aggregate> = Vec::new();
    for run in &runs {
        let key = ConfigKey { config: run.record.config.clone(), minsup: run.record.minsup };
        let idx = match aggregates.iter().position(|a| a.key == key) {
            Some(i) => i,
            None => {
                aggregates.push(Aggregate::empty(key));
                aggregates.len() - 1
            }
        };
        let a = &mut aggregates[idx];
        a.runs += 1;
        a.solved += usize::from(run.record.solved());
        a.time_sum += run.time_score;
        a.quality_sum += run.quality_score;
    }
    if let Some(base) = aggregates.iter().find(|a| a.key == ConfigKey::baseline()).cloned() {
        for a in &mut aggregates {
            a.time_gain = gain(base.time_sum, a.time_sum);
            a.quality_gain = gain(base.quality_sum, a.quality_sum);
        }
    }
    ScoreReport { runs, references: refs, aggregates }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(problem: &str, config: &str, minsup: Option<f64>, cost: Option<usize>, seconds: f64) -> RunRecord {
        RunRecord {
            minsup,
            problem: problem.into(),
            config: config.into(),
            outcome: if cost.is_some() { Outcome::Solved } else { Outcome::Timeout },
            cost,
            seconds,
            expanded: 0,
            macros: 0,
            macro_edges: 0,
        }
    }

    #[test]
    fn time_score_examples() {
        assert_eq!(time_score(2.0, Some(4.0)), 0.5);
        assert_eq!(time_score(3.0, Some(3.0)), 1.0);
        assert_eq!(time_score(3.0, None), 0.0);
        assert_eq!(time_score(0.0, Some(0.0)), 1.0);
        assert_eq!(time_score(0.0, Some(2e-6)), 0.5);
    }

    #[test]
    fn quality_score_examples() {
        assert_eq!(quality_score(6, Some(8)), 0.75);
        assert_eq!(quality_score(5, Some(5)), 1.0);
        assert_eq!(quality_score(5, None), 0.0);
        assert_eq!(quality_score(0, Some(0)), 1.0);
    }

    #[test]
    fn gain_examples() {
        assert!((gain(10.0, 47.2).unwrap() - 372.0).abs() < 1e-9);
        assert_eq!(gain(10.0, 10.0), Some(0.0));
        assert!((gain(10.0, 8.8).unwrap() + 12.0).abs() < 1e-9);
        assert_eq!(gain(0.0, 3.0), None);
    }

    #[test]
    fn report_uses_best_over_configs() {
        let records = vec![
            run("p1", BASELINE, None, Some(10), 4.0),
            run("p1", MACROS, Some(0.01), Some(12), 1.0),
            run("p2", BASELINE, None, None, 300.0),
            run("p2", MACROS, Some(0.01), Some(6), 2.0),
        ];
        let report = score_runs(records);
        assert_eq!(report.references["p1"], Reference { best_time: Some(1.0), best_cost: Some(10) });
        assert_eq!(report.references["p2"], Reference { best_time: Some(2.0), best_cost: Some(6) });
        let scores: Vec<(f64, f64)> = report.runs.iter().map(|r| (r.time_score, r.quality_score)).collect();
        assert_eq!(scores, [(0.25, 1.0), (1.0, 10.0 / 12.0), (0.0, 0.0), (1.0, 1.0)]);

        let base = report.aggregate(&ConfigKey::baseline()).unwrap();
        assert_eq!((base.time_sum, base.quality_sum), (0.25, 1.0));
        let mac = report.aggregate(&ConfigKey { config: MACROS.into(), minsup: Some(0.01) }).unwrap();
        assert_eq!(mac.solved, 2);
        assert!((mac.time_gain.unwrap() - 700.0).abs() < 1e-9);
        assert_eq!(base.time_gain, Some(0.0));
    }

    #[test]
    fn nothing_solved_means_no_gain() {
        let report = score_runs(vec![run("p", BASELINE, None, None, 1.0), run("p", MACROS, Some(0.5), None, 1.0)]);
        assert!(report.aggregates.iter().all(|a| a.time_gain.is_none()));
    }
}
