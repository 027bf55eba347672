//! Support sweeps: mine at increasing minimum support, search every test
//! problem with the resulting macros, and score against the baseline.

use std::fmt;

use super::score::{score_runs, Aggregate, ConfigKey, RunRecord, ScoreReport, BASELINE, CLOCK_RESOLUTION_SECS, MACROS};
use super::{run_all, BenchError, Instance, RunSettings};
use crate::macros::{encode_mined, enhanced_astar, MacroLibrary, Provenance};
use crate::mining::patterns::{decode_patterns, MinedPattern};
use crate::mining::{mine_maximal, MiningConfig, SequenceDatabase};
use crate::search::{SearchOptions, SearchResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub start: f64,
    pub step: f64,
    pub end: f64,
    pub max_length: Option<usize>,
    pub settings: RunSettings,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { start: 0.01, step: 0.01, end: 1.0, max_length: None, settings: RunSettings::default() }
    }
}

impl SweepConfig {
    fn validate(&self) -> Result<(), BenchError> {
        let unit = |x: f64| x > 0.0 && x <= 1.0;
        if !unit(self.start) || !unit(self.end) {
            return Err(BenchError::Config(format!(
                "minsup range must lie in (0, 1], got {} to {}",
                self.start, self.end
            )));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(BenchError::Config(format!("minsup step must be positive, got {}", self.step)));
        }
        if self.max_length == Some(0) {
            return Err(BenchError::Config("max pattern length must be positive".into()));
        }
        Ok(())
    }

    /// The `i`-th support value, rounded to nine decimals so that repeated
    /// steps do not drift.
    pub fn point(&self, i: usize) -> f64 {
        ((self.start + i as f64 * self.step) * 1e9).round() / 1e9
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopReason {
    /// Mining at this support found nothing.
    NoSequences {
        minsup: f64,
    },
    RangeEnd,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StopReason::NoSequences { minsup } => write!(f, "no sequences at minsup {minsup}"),
            StopReason::RangeEnd => f.write_str("range end"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub minsup: f64,
    pub patterns: usize,
    /// Macros bound, summed over the test problems.
    pub macros: usize,
    pub aggregate: Aggregate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub baseline: Aggregate,
    /// In strictly increasing minsup order.
    pub points: Vec<SweepPoint>,
    pub stop: StopReason,
    /// Every run, baseline first, then each point's runs in test-problem order.
    pub report: ScoreReport,
}

fn record(minsup: Option<f64>, config: &str, problem: &str, macros: usize, r: &SearchResult) -> RunRecord {
    RunRecord {
        minsup,
        problem: problem.to_string(),
        config: config.to_string(),
        outcome: r.outcome,
        cost: r.cost(),
        seconds: round_to_clock(r.seconds),
        expanded: r.expanded,
        macros,
        macro_edges: r.macro_edges.len(),
    }
}

/// Timings are kept at clock resolution so the run table round-trips.
fn round_to_clock(secs: f64) -> f64 {
    (secs / CLOCK_RESOLUTION_SECS).round() / (1.0 / CLOCK_RESOLUTION_SECS).round()
}

fn search(inst: &Instance, library: &MacroLibrary, settings: &RunSettings) -> SearchResult {
    let mut h = settings.heuristic.build(&inst.task);
    let opts =
        SearchOptions { limits: settings.limits, macro_successors: settings.macro_successors, record_trace: false };
    enhanced_astar(&inst.task, library, h.as_mut(), &opts)
}

/// Runs the baseline once over `test`, then one macro configuration per
/// support value from `start` in `step`s until mining comes back empty or
/// the range ends.
pub fn sweep(
    db: &SequenceDatabase,
    corpus_id: &str,
    test: &[Instance],
    cfg: &SweepConfig,
) -> Result<SweepResult, BenchError> {
    cfg.validate()?;
    let settings = &cfg.settings;
    let empty = MacroLibrary::empty();
    let mut records: Vec<RunRecord> = run_all(test, settings.single_thread, |inst| {
        record(None, BASELINE, &inst.name, 0, &search(inst, &empty, settings))
    });

    let mut mined_points: Vec<(f64, usize, usize)> = Vec::new();
    let mut stop = StopReason::RangeEnd;
    for i in 0.. {
        let minsup = cfg.point(i);
        if minsup > cfg.end + 1e-9 {
            break;
        }
        let patterns = mine_maximal(db, &MiningConfig::with_max_length(minsup, cfg.max_length)?);
        if patterns.is_empty() {
            stop = StopReason::NoSequences { minsup };
            break;
        }
        let mined: Vec<MinedPattern> = decode_patterns(&patterns, &db.dictionary);
        let provenance = Provenance { corpus: corpus_id.to_string(), minsup: Some(minsup) };
        let runs = run_all(test, settings.single_thread, |inst| {
            let (library, _) = encode_mined(&mined, &inst.task, provenance.clone());
            record(Some(minsup), MACROS, &inst.name, library.len(), &search(inst, &library, settings))
        });
        mined_points.push((minsup, patterns.len(), runs.iter().map(|r| r.macros).sum()));
        records.extend(runs);
    }

    let report = score_runs(records);
    let agg = |key: ConfigKey| report.aggregate(&key).cloned();
    let baseline = agg(ConfigKey::baseline()).unwrap_or_else(|| Aggregate::empty(ConfigKey::baseline()));
    let points = mined_points
        .into_iter()
        .map(|(minsup, patterns, macros)| {
            let key = ConfigKey { config: MACROS.into(), minsup: Some(minsup) };
            let aggregate = agg(key.clone()).unwrap_or_else(|| Aggregate::empty(key));
            SweepPoint { minsup, patterns, macros, aggregate }
        })
        .collect();
    Ok(SweepResult { baseline, points, stop, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{generate_suite, load_generated, DomainKind, SizeParams};
    use crate::mining::build_sequence_db;
    use crate::plan::Plan;

    fn plan(steps: &[&str]) -> Plan {
        Plan::new(steps.iter().map(|s| s.to_string()).collect())
    }

    fn test_set() -> Vec<Instance> {
        let size = SizeParams { blocks: 3, ..Default::default() };
        let suite = generate_suite(DomainKind::Blocksworld, &size, 0, 2, 11).unwrap();
        load_generated(DomainKind::Blocksworld, &suite.test).unwrap()
    }

    fn single() -> SweepConfig {
        SweepConfig { settings: RunSettings { single_thread: true, ..Default::default() }, ..Default::default() }
    }

    #[test]
    fn points_do_not_drift() {
        let cfg = SweepConfig::default();
        assert_eq!(cfg.point(0), 0.01);
        assert_eq!(cfg.point(6), 0.07);
        assert_eq!(cfg.point(28), 0.29);
        assert_eq!(cfg.point(99), 1.0);
    }

    #[test]
    fn stops_at_first_empty_mining_result() {
        // Three plans sharing one step: frequent up to 100%.
        let db = build_sequence_db(&[
            plan(&["pick-up b1", "stack b1 b2"]),
            plan(&["pick-up b1", "put-down b1"]),
            plan(&["pick-up b1"]),
        ])
        .unwrap();
        let test = test_set();
        let r = sweep(&db, "c", &test, &single()).unwrap();
        assert_eq!(r.stop, StopReason::RangeEnd);
        assert_eq!(r.points.len(), 100);

        let db = build_sequence_db(&[plan(&["pick-up b1"]), plan(&["pick-up b2"])]).unwrap();
        let r = sweep(&db, "c", &test, &single()).unwrap();
        assert_eq!(r.stop, StopReason::NoSequences { minsup: 0.51 });
        assert_eq!(r.points.len(), 50);
        assert_eq!(r.report.runs.len(), test.len() * 51);
    }

    #[test]
    fn rejects_bad_ranges() {
        let db = build_sequence_db(&[plan(&["a"])]).unwrap();
        for cfg in [
            SweepConfig { start: 0.0, ..single() },
            SweepConfig { step: 0.0, ..single() },
            SweepConfig { end: 1.5, ..single() },
        ] {
            assert!(matches!(sweep(&db, "c", &[], &cfg), Err(BenchError::Config(_))));
        }
    }
}
