//! Report files: the per-run score table, the gain summary, and
//! gnuplot data files of gain against support.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::score::{ScoreReport, BASELINE};
use super::sweep::SweepResult;
use super::{BenchError, RunRecord};

pub const RUN_HEADER: [&str; 9] =
    ["minsup", "problem", "config", "outcome", "cost", "seconds", "expanded", "time_score", "quality_score"];

/// Comment lines stating how the scores and gains were computed.
pub const SCORING_NOTES: [&str; 4] = [
    "unsolved runs score 0 for both time and quality",
    "time score = T*/T, quality score = Q*/Q; T*, Q* = best over all configurations in this report",
    "times below 1e-6 s are clamped to 1e-6 s",
    "gain % = (sum of config scores - sum of baseline scores) / sum of baseline scores * 100",
];

fn table_err(e: impl std::fmt::Display) -> BenchError {
    BenchError::Table(e.to_string())
}

/// The run table, one row per scored run, in report order.
pub fn runs_csv(report: &ScoreReport) -> Result<String, BenchError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RUN_HEADER).map_err(table_err)?;
    for run in &report.runs {
        let r = &run.record;
        w.write_record([
            r.minsup.map(|m| m.to_string()).unwrap_or_default(),
            r.problem.clone(),
            r.config.clone(),
            r.outcome.to_string(),
            r.cost.map(|c| c.to_string()).unwrap_or_default(),
            format!("{:.6}", r.seconds),
            r.expanded.to_string(),
            format!("{:.6}", run.time_score),
            format!("{:.6}", run.quality_score),
        ])
        .map_err(table_err)?;
    }
    let bytes = w.into_inner().map_err(table_err)?;
    String::from_utf8(bytes).map_err(table_err)
}

/// Reads the run table back. Score columns are ignored; rescore with
/// [`score_runs`](super::score_runs).
pub fn read_runs_csv(text: &str) -> Result<Vec<RunRecord>, BenchError> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().map_err(table_err)?.clone();
    if header.iter().collect::<Vec<_>>() != RUN_HEADER {
        return Err(BenchError::Table(format!("expected header `{}`", RUN_HEADER.join(","))));
    }
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(table_err)?;
        let line = i + 2;
        let bad = |col: &str, v: &str| BenchError::Table(format!("line {line}: bad {col} `{v}`"));
        let opt = |col: usize| Some(&row[col]).filter(|v| !v.is_empty());
        let minsup = opt(0).map(|v| v.parse::<f64>().map_err(|_| bad("minsup", v))).transpose()?;
        let cost = opt(4).map(|v| v.parse::<usize>().map_err(|_| bad("cost", v))).transpose()?;
        let outcome = row[3].parse().map_err(|_| bad("outcome", &row[3]))?;
        let seconds = row[5].parse().map_err(|_| bad("seconds", &row[5]))?;
        let expanded = row[6].parse().map_err(|_| bad("expanded", &row[6]))?;
        out.push(RunRecord {
            minsup,
            problem: row[1].to_string(),
            config: row[2].to_string(),
            outcome,
            cost,
            seconds,
            expanded,
            macros: 0,
            macro_edges: 0,
        });
    }
    Ok(out)
}

fn fmt_gain(g: Option<f64>) -> String {
    g.map(|g| format!("{g:.2}")).unwrap_or_else(|| "undefined".into())
}

/// Per-configuration aggregates and gains, with `#` comment lines on top.
pub fn gain_summary(report: &ScoreReport, notes: &[String]) -> String {
    let mut out = String::from("# gain summary\n");
    for n in notes.iter().map(String::as_str).chain(SCORING_NOTES) {
        let _ = writeln!(out, "# {n}");
    }
    out.push_str("config,minsup,runs,solved,time_sum,quality_sum,time_gain,quality_gain\n");
    for a in &report.aggregates {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.6},{:.6},{},{}",
            a.key.config,
            a.key.minsup.map(|m| m.to_string()).unwrap_or_default(),
            a.runs,
            a.solved,
            a.time_sum,
            a.quality_sum,
            fmt_gain(a.time_gain),
            fmt_gain(a.quality_gain)
        );
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Time,
    Quality,
}

/// Two columns, support in percent and gain in percent, one line per
/// non-baseline configuration with a minsup. Undefined gains are left
/// out as comments.
pub fn plot_data(report: &ScoreReport, metric: Metric, title: &str) -> String {
    let name = match metric {
        Metric::Time => "time",
        Metric::Quality => "quality",
    };
    let mut out = format!("# {title}: {name} gain vs support\n# minsup% gain%\n");
    for a in report.aggregates.iter().filter(|a| a.key.config != BASELINE) {
        let Some(m) = a.key.minsup else { continue };
        let pct = (m * 100.0 * 1e6).round() / 1e6;
        match match metric {
            Metric::Time => a.time_gain,
            Metric::Quality => a.quality_gain,
        } {
            Some(g) => {
                let _ = writeln!(out, "{pct} {g:.4}");
            }
            None => {
                let _ = writeln!(out, "# {pct} undefined");
            }
        }
    }
    out
}

/// Writes `<label>-runs.csv`, `<label>-gain.txt`, `<label>-time.dat` and
/// `<label>-quality.dat` into `dir`.
pub fn write_report_files(
    report: &ScoreReport,
    notes: &[String],
    dir: &Path,
    label: &str,
) -> Result<Vec<PathBuf>, BenchError> {
    fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
    let files = [
        (format!("{label}-runs.csv"), runs_csv(report)?),
        (format!("{label}-gain.txt"), gain_summary(report, notes)),
        (format!("{label}-time.dat"), plot_data(report, Metric::Time, label)),
        (format!("{label}-quality.dat"), plot_data(report, Metric::Quality, label)),
    ];
    let mut written = Vec::new();
    for (name, text) in files {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| BenchError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

/// Summary notes for a sweep: the stop reason and per-point pattern counts.
pub fn sweep_notes(result: &SweepResult) -> Vec<String> {
    let mut notes = vec![format!("stop: {}", result.stop)];
    for p in &result.points {
        notes.push(format!("minsup {}: {} patterns, {} macros bound", p.minsup, p.patterns, p.macros));
    }
    notes
}
