use std::fs;
use std::path::Path;

use macroforge::bench::corpus::read_plan_dir;
use macroforge::macros::read_library;
use macroforge::mining::patterns::{decode_patterns, read_patterns, write_patterns};
use macroforge::mining::{build_labelled_sequence_db, mine_maximal, MiningConfig};
use macroforge::{load_task, validate_plan, Plan};
use macroforge_cli::dispatch;

fn run(args: &[&str]) -> i32 {
    dispatch(std::iter::once("macroforge").chain(args.iter().copied()))
}

/// Runs a whitespace-separated command line.
fn sh(line: &str) -> i32 {
    run(&line.split_whitespace().collect::<Vec<_>>())
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const BW2_DOMAIN: &str = include_str!("../../core/domains/blocksworld.pddl");
const BW2_PROBLEM: &str = include_str!("../../core/domains/blocksworld-2.pddl");

#[test]
fn usage_errors_exit_two_and_help_exits_zero() {
    assert_eq!(run(&["sweep", "--bogus"]), 2);
    assert_eq!(run(&["frobnicate"]), 2);
    assert_eq!(run(&[]), 2);
    assert_eq!(run(&["mine", "--plans", "x", "--minsup", "abc", "--out", "y"]), 2);
    assert_eq!(run(&["--help"]), 0);
    assert_eq!(run(&["solve", "--help"]), 0);
}

#[test]
fn solve_writes_a_valid_plan() {
    let dir = tempfile::tempdir().unwrap();
    let (d, pr, out) = (dir.path().join("d.pddl"), dir.path().join("p.pddl"), dir.path().join("p.plan"));
    fs::write(&d, BW2_DOMAIN).unwrap();
    fs::write(&pr, BW2_PROBLEM).unwrap();
    assert_eq!(run(&["solve", "--domain", p(&d), "--problem", p(&pr), "--timeout", "300"]), 0);
    let plan = Plan::parse(&fs::read_to_string(&out).unwrap()).unwrap();
    let task = load_task(BW2_DOMAIN, BW2_PROBLEM).unwrap();
    assert!(validate_plan(&task, &plan).valid);
    assert_eq!(plan.steps, ["pick-up a", "stack a b"]);
}

#[test]
fn planning_failures_exit_one_and_bad_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d.pddl");
    fs::write(&d, BW2_DOMAIN).unwrap();
    let unreachable = dir.path().join("u.pddl");
    fs::write(&unreachable, BW2_PROBLEM.replace("(on a b)", "(on a a)")).unwrap();
    assert_eq!(run(&["solve", "--domain", p(&d), "--problem", p(&unreachable)]), 1);
    assert!(!dir.path().join("u.plan").exists());

    let missing = dir.path().join("missing.pddl");
    assert_eq!(run(&["solve", "--domain", p(&d), "--problem", p(&missing)]), 2);
    let broken = dir.path().join("b.pddl");
    fs::write(&broken, "(define (problem x) (:domain blocksworld)").unwrap();
    assert_eq!(run(&["solve", "--domain", p(&d), "--problem", p(&broken)]), 2);
    assert_eq!(run(&["solve", "--domain", p(&d), "--problem", p(&unreachable), "--timeout", "0"]), 2);
}

#[test]
fn staged_pipeline_matches_library_calls() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let suite = root.join("suite");
    assert_eq!(
        sh(&format!("gen-problems --kind blocksworld --train 10 --test 3 --blocks 4 --seed 7 --out {}", p(&suite))),
        0
    );
    let domain = suite.join("domain.pddl");
    let corpus = root.join("corpus");
    assert_eq!(
        sh(&format!(
            "gen-corpus --domain {} --problems {} --single-thread --out {}",
            p(&domain),
            p(&suite.join("train")),
            p(&corpus)
        )),
        0
    );
    let plans = read_plan_dir(&corpus).unwrap();
    assert_eq!(plans.len(), 10);
    assert!(corpus.join("corpus.spmf").exists() && corpus.join("corpus.dict").exists());

    let patterns = root.join("patterns.txt");
    assert_eq!(run(&["mine", "--plans", p(&corpus), "--minsup", "0.2", "--out", p(&patterns)]), 0);
    // Same patterns as a direct library call.
    let (labels, seqs): (Vec<String>, Vec<Plan>) = plans.into_iter().unzip();
    let db = build_labelled_sequence_db(&seqs, labels).unwrap();
    let direct = decode_patterns(&mine_maximal(&db, &MiningConfig::new(0.2).unwrap()), &db.dictionary);
    let text = fs::read_to_string(&patterns).unwrap();
    let from_cli: Vec<_> = read_patterns(&text).unwrap().into_iter().map(|(_, p)| p).collect();
    assert_eq!(from_cli, direct);
    assert!(text.ends_with(&write_patterns(&direct)));

    let test_problem = suite.join("test").join("bw-test-001.pddl");
    let library = root.join("macros.txt");
    assert_eq!(
        sh(&format!(
            "encode --domain {} --problem {} --patterns {} --out {}",
            p(&domain),
            p(&test_problem),
            p(&patterns),
            p(&library)
        )),
        0
    );
    let task = load_task(&fs::read_to_string(&domain).unwrap(), &fs::read_to_string(&test_problem).unwrap()).unwrap();
    let (lib, _) = read_library(&fs::read_to_string(&library).unwrap(), &task).unwrap();
    assert_eq!(lib.provenance.minsup, Some(0.2));

    let plan_out = root.join("solved.plan");
    assert_eq!(
        sh(&format!(
            "solve --domain {} --problem {} --macros {} --macro-successors final --out {}",
            p(&domain),
            p(&test_problem),
            p(&library),
            p(&plan_out)
        )),
        0
    );
    let plan = Plan::parse(&fs::read_to_string(&plan_out).unwrap()).unwrap();
    assert!(validate_plan(&task, &plan).valid);

    let reports = root.join("reports");
    assert_eq!(
        sh(&format!(
            "sweep --domain {} --plans {} --test {} --single-thread --label bw --out {}",
            p(&domain),
            p(&corpus),
            p(&suite.join("test")),
            p(&reports)
        )),
        0
    );
    for f in ["bw-runs.csv", "bw-gain.txt", "bw-time.dat", "bw-quality.dat"] {
        assert!(reports.join(f).exists(), "{f}");
    }
    let table = fs::read_to_string(reports.join("bw-runs.csv")).unwrap();
    assert!(table.starts_with("minsup,problem,config,outcome,cost,seconds,expanded,time_score,quality_score\n"));

    let rescored = root.join("rescored");
    assert_eq!(run(&["score", "--runs", p(&reports.join("bw-runs.csv")), "--out", p(&rescored)]), 0);
    assert_eq!(fs::read_to_string(rescored.join("bw-runs.csv")).unwrap(), table);
}

#[test]
fn seed_falls_back_to_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(
        run(&["gen-problems", "--kind", "gripper", "--train", "2", "--test", "1", "--seed", "42", "--out", p(&a)]),
        0
    );
    std::env::set_var("MACROFORGE_SEED", "42");
    let code = run(&["gen-problems", "--kind", "gripper", "--train", "2", "--test", "1", "--out", p(&b)]);
    std::env::remove_var("MACROFORGE_SEED");
    assert_eq!(code, 0);
    let read = |dir: &Path| fs::read_to_string(dir.join("train").join("gripper-train-001.pddl")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn invalid_minsup_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.txt");
    assert_eq!(run(&["mine", "--plans", p(dir.path()), "--minsup", "0", "--out", p(&out)]), 2);
    assert_eq!(run(&["mine", "--plans", p(dir.path()), "--minsup", "1.5", "--out", p(&out)]), 2);
}
