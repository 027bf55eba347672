//! The `macroforge` command line.
//!
//! Each subcommand reads and writes plain files so any stage can be
//! re-run on its own:
//!
//! ```text
//! gen-problems -> gen-corpus -> mine -> encode -> solve
//!                            \-> sweep -> score
//! ```

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use macroforge::bench::corpus::{read_plan_dir, write_corpus};
use macroforge::bench::report::{read_runs_csv, sweep_notes, write_report_files};
use macroforge::bench::{
    build_corpus, generate_suite, load_instances, score_runs, sweep, DomainKind, Instance, RunSettings, SizeParams,
    SweepConfig,
};
use macroforge::macros::{read_library, write_library, MacroLibrary};
use macroforge::mining::patterns::{decode_patterns, write_patterns};
use macroforge::mining::{build_labelled_sequence_db, mine_maximal, MiningConfig};
use macroforge::search::DEFAULT_NODE_BYTES;
use macroforge::{enhanced_astar, load_task, HeuristicKind, Limits, MacroSuccessors, Outcome, SearchOptions};

/// Exit code for a run that parsed fine but found no plan.
pub const EXIT_NO_PLAN: i32 = 1;
/// Exit code for bad arguments, unreadable inputs and malformed files.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "macroforge", version, about = "Learn macro-actions from plans and plan with them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one problem, optionally with a macro library.
    Solve(SolveArgs),
    /// Generate disjoint training and test problems for a bundled domain.
    GenProblems(GenArgs),
    /// Solve training problems with the baseline planner and store their plans.
    GenCorpus(CorpusArgs),
    /// Mine maximal frequent action sequences from a plan directory.
    Mine(MineArgs),
    /// Bind mined sequences to one problem's actions, writing a macro library.
    Encode(EncodeArgs),
    /// Mine at increasing support and score macro search against the baseline.
    Sweep(SweepArgs),
    /// Rescore a run table and rewrite the gain summary and plot data.
    Score(ScoreArgs),
}

#[derive(Debug, Args)]
struct SearchFlags {
    /// Heuristic: ff (relaxed plan length) or zero (blind).
    #[arg(long, default_value_t = HeuristicKind::Ff)]
    heuristic: HeuristicKind,
    /// Which macro states become nodes: all (every intermediate state) or final.
    #[arg(long, default_value_t = MacroSuccessors::All)]
    macro_successors: MacroSuccessors,
    /// Stop with memory-out after this many generated nodes.
    #[arg(long)]
    node_cap: Option<usize>,
    /// Memory cap in MiB, enforced as a node cap of MiB / --node-bytes.
    #[arg(long)]
    memory_cap: Option<usize>,
    /// Estimated bytes per search node, used with --memory-cap.
    #[arg(long, default_value_t = DEFAULT_NODE_BYTES)]
    node_bytes: usize,
}

impl SearchFlags {
    fn limits(&self, timeout: f64) -> Result<Limits> {
        if !(timeout > 0.0 && timeout.is_finite()) {
            bail!("--timeout must be a positive number of seconds");
        }
        if self.node_bytes == 0 {
            bail!("--node-bytes must be positive");
        }
        Ok(Limits {
            timeout: Some(std::time::Duration::from_secs_f64(timeout)),
            node_cap: Limits::node_cap_from(self.node_cap, self.memory_cap, self.node_bytes),
        })
    }

    fn settings(&self, timeout: f64, single_thread: bool) -> Result<RunSettings> {
        Ok(RunSettings {
            limits: self.limits(timeout)?,
            heuristic: self.heuristic,
            macro_successors: self.macro_successors,
            single_thread,
        })
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Domain file (PDDL).
    #[arg(long)]
    domain: PathBuf,
    /// Problem file (PDDL).
    #[arg(long)]
    problem: PathBuf,
    /// Macro library written by `encode`.
    #[arg(long)]
    macros: Option<PathBuf>,
    /// Search time limit in seconds.
    #[arg(long, default_value_t = 300.0)]
    timeout: f64,
    /// Plan file to write [default: the problem path with a .plan extension].
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    search: SearchFlags,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// blocksworld, ferry or gripper.
    #[arg(long)]
    kind: DomainKind,
    /// Number of training problems.
    #[arg(long, default_value_t = 50)]
    train: usize,
    /// Number of test problems.
    #[arg(long, default_value_t = 20)]
    test: usize,
    /// Random seed; falls back to MACROFORGE_SEED.
    #[arg(long, env = "MACROFORGE_SEED", default_value_t = 1)]
    seed: u64,
    /// Blocks per blocksworld problem.
    #[arg(long, default_value_t = SizeParams::default().blocks)]
    blocks: usize,
    /// Cars per ferry problem.
    #[arg(long, default_value_t = SizeParams::default().cars)]
    cars: usize,
    /// Locations per ferry problem.
    #[arg(long, default_value_t = SizeParams::default().locations)]
    locations: usize,
    /// Balls per gripper problem.
    #[arg(long, default_value_t = SizeParams::default().balls)]
    balls: usize,
    /// Rooms per gripper problem.
    #[arg(long, default_value_t = SizeParams::default().rooms)]
    rooms: usize,
    /// Output directory: receives domain.pddl, train/ and test/.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct CorpusArgs {
    /// Domain file (PDDL).
    #[arg(long)]
    domain: PathBuf,
    /// Directory of training problem files (*.pddl).
    #[arg(long)]
    problems: PathBuf,
    /// Per-problem search time limit in seconds.
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
    /// Solve problems one at a time.
    #[arg(long)]
    single_thread: bool,
    /// Directory for the plan files and corpus.spmf / corpus.dict.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    search: SearchFlags,
}

#[derive(Debug, Args)]
struct MineArgs {
    /// Directory of plan files (*.plan).
    #[arg(long)]
    plans: PathBuf,
    /// Minimum support as a fraction of plans, in (0, 1].
    #[arg(long, default_value_t = 0.01)]
    minsup: f64,
    /// Longest pattern to report.
    #[arg(long)]
    max_length: Option<usize>,
    /// Pattern file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EncodeArgs {
    /// Domain file (PDDL).
    #[arg(long)]
    domain: PathBuf,
    /// Problem file (PDDL).
    #[arg(long)]
    problem: PathBuf,
    /// Pattern file written by `mine`.
    #[arg(long)]
    patterns: PathBuf,
    /// Macro library file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Domain file (PDDL).
    #[arg(long)]
    domain: PathBuf,
    /// Directory of training plan files (*.plan).
    #[arg(long)]
    plans: PathBuf,
    /// Directory of test problem files (*.pddl).
    #[arg(long)]
    test: PathBuf,
    /// First minimum support, as a fraction of plans.
    #[arg(long, default_value_t = 0.01)]
    start: f64,
    /// Support increment between sweep points.
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    /// Last support tried if mining never comes back empty.
    #[arg(long, default_value_t = 1.0)]
    end: f64,
    /// Longest pattern to mine.
    #[arg(long)]
    max_length: Option<usize>,
    /// Per-run search time limit in seconds.
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
    /// Run searches one at a time; report files are then reproducible
    /// apart from the timing columns.
    #[arg(long)]
    single_thread: bool,
    /// Prefix for report files [default: the domain name].
    #[arg(long)]
    label: Option<String>,
    /// Directory for the report files.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    search: SearchFlags,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    /// Run table (`<label>-runs.csv`).
    #[arg(long)]
    runs: PathBuf,
    /// Prefix for report files [default: taken from the run table name].
    #[arg(long)]
    label: Option<String>,
    /// Directory for the report files.
    #[arg(long)]
    out: PathBuf,
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Solve(a) => solve(a),
        Command::GenProblems(a) => gen_problems(a),
        Command::GenCorpus(a) => gen_corpus(a),
        Command::Mine(a) => mine(a),
        Command::Encode(a) => encode(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Score(a) => score(a),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn require_dir(path: &Path) -> Result<()> {
    if !path.is_dir() {
        bail!("{} is not a directory", path.display());
    }
    Ok(())
}

fn check_minsup(minsup: f64) -> Result<()> {
    if !(minsup > 0.0 && minsup <= 1.0) {
        bail!("minsup must lie in (0, 1], got {minsup}");
    }
    Ok(())
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// `(file stem, text)` of every `*.pddl` file in `dir`, sorted by path.
fn read_problem_dir(dir: &Path) -> Result<Vec<(String, String)>> {
    require_dir(dir)?;
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot list {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "pddl"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!("no .pddl files in {}", dir.display());
    }
    paths.iter().map(|p| Ok((p.file_stem().unwrap_or_default().to_string_lossy().into_owned(), read(p)?))).collect()
}

fn load_dir(domain: &Path, dir: &Path) -> Result<Vec<Instance>> {
    let domain_text = read(domain)?;
    let problems = read_problem_dir(dir)?;
    Ok(load_instances(&domain_text, &problems)?)
}

fn solve(a: SolveArgs) -> Result<i32> {
    let limits = a.search.limits(a.timeout)?;
    let (domain_text, problem_text) = (read(&a.domain)?, read(&a.problem)?);
    let library_text = a.macros.as_deref().map(read).transpose()?;
    let task = load_task(&domain_text, &problem_text)?;
    let library = match library_text {
        Some(text) => {
            let (lib, dropped) = read_library(&text, &task)?;
            for d in &dropped {
                eprintln!("dropped macro on line {}: {}", d.line.unwrap_or(0), d.reason);
            }
            lib
        }
        None => MacroLibrary::empty(),
    };
    let mut h = a.search.heuristic.build(&task);
    let opts = SearchOptions { limits, macro_successors: a.search.macro_successors, record_trace: false };
    let result = enhanced_astar(&task, &library, h.as_mut(), &opts);
    println!("{}", result.record_line(task_name(&a.problem)));
    match (&result.outcome, &result.plan) {
        (Outcome::Solved, Some(plan)) => {
            let out = a.out.unwrap_or_else(|| a.problem.with_extension("plan"));
            write(&out, &plan.to_text())?;
            Ok(0)
        }
        _ => {
            eprintln!("no plan: {}", result.outcome);
            Ok(EXIT_NO_PLAN)
        }
    }
}

fn task_name(problem: &Path) -> &str {
    problem.file_stem().and_then(|s| s.to_str()).unwrap_or("problem")
}

fn gen_problems(a: GenArgs) -> Result<i32> {
    let size = SizeParams { blocks: a.blocks, cars: a.cars, locations: a.locations, balls: a.balls, rooms: a.rooms };
    let suite = generate_suite(a.kind, &size, a.train, a.test, a.seed)?;
    write(&a.out.join("domain.pddl"), a.kind.domain_pddl())?;
    for (sub, problems) in [("train", &suite.training), ("test", &suite.test)] {
        let dir = a.out.join(sub);
        fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
        for p in problems {
            write(&dir.join(format!("{}.pddl", p.name)), &p.text)?;
        }
    }
    println!("{} training and {} test problems in {}", suite.training.len(), suite.test.len(), a.out.display());
    Ok(0)
}

fn gen_corpus(a: CorpusArgs) -> Result<i32> {
    let settings = a.search.settings(a.timeout, a.single_thread)?;
    let instances = load_dir(&a.domain, &a.problems)?;
    let corpus = build_corpus(&instances, &settings)?;
    for (name, why) in &corpus.excluded {
        eprintln!("excluded {name}: {why}");
    }
    write_corpus(&corpus, &a.out)?;
    println!("{} of {} problems solved; corpus in {}", corpus.plans.len(), instances.len(), a.out.display());
    Ok(0)
}

fn mine(a: MineArgs) -> Result<i32> {
    check_minsup(a.minsup)?;
    require_dir(&a.plans)?;
    let cfg = MiningConfig::with_max_length(a.minsup, a.max_length)?;
    let plans = read_plan_dir(&a.plans)?;
    let (labels, plans): (Vec<String>, Vec<_>) = plans.into_iter().unzip();
    let db = build_labelled_sequence_db(&plans, labels)?;
    let patterns = decode_patterns(&mine_maximal(&db, &cfg), &db.dictionary);
    let header = format!("; corpus: {}\n; minsup: {}\n", a.plans.display(), a.minsup);
    write(&a.out, &(header + &write_patterns(&patterns)))?;
    println!("{} patterns from {} plans (threshold {})", patterns.len(), db.len(), cfg.threshold(db.len()));
    Ok(0)
}

fn encode(a: EncodeArgs) -> Result<i32> {
    let (domain_text, problem_text, patterns) = (read(&a.domain)?, read(&a.problem)?, read(&a.patterns)?);
    let task = load_task(&domain_text, &problem_text)?;
    let (library, dropped) = read_library(&patterns, &task)?;
    for d in &dropped {
        eprintln!("dropped pattern on line {}: {}", d.line.unwrap_or(0), d.reason);
    }
    write(&a.out, &write_library(&library, &now()))?;
    println!("{} macros bound, {} dropped", library.len(), dropped.len());
    Ok(0)
}

fn run_sweep(a: SweepArgs) -> Result<i32> {
    check_minsup(a.start)?;
    check_minsup(a.end)?;
    if a.step.is_nan() || a.step <= 0.0 {
        bail!("--step must be positive");
    }
    let settings = a.search.settings(a.timeout, a.single_thread)?;
    require_dir(&a.plans)?;
    let test = load_dir(&a.domain, &a.test)?;
    let plans = read_plan_dir(&a.plans)?;
    let (labels, plans): (Vec<String>, Vec<_>) = plans.into_iter().unzip();
    let db = build_labelled_sequence_db(&plans, labels)?;
    let label = match a.label {
        Some(l) => l,
        None => macroforge::parse_domain(&read(&a.domain)?)?.name,
    };
    let cfg = SweepConfig { start: a.start, step: a.step, end: a.end, max_length: a.max_length, settings };
    let result = sweep(&db, &a.plans.display().to_string(), &test, &cfg)?;
    let mut notes = vec![format!("domain: {label}"), format!("date: {}", now())];
    notes.extend(sweep_notes(&result));
    let files = write_report_files(&result.report, &notes, &a.out, &label)?;
    println!("{} sweep points; stop: {}", result.points.len(), result.stop);
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(0)
}

fn score(a: ScoreArgs) -> Result<i32> {
    let records = read_runs_csv(&read(&a.runs)?).with_context(|| format!("in {}", a.runs.display()))?;
    let label = a.label.unwrap_or_else(|| {
        let stem = task_name(&a.runs);
        stem.strip_suffix("-runs").unwrap_or(stem).to_string()
    });
    let report = score_runs(records);
    let files = write_report_files(&report, &[format!("source: {}", a.runs.display())], &a.out, &label)?;
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(0)
}
