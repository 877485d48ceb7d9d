use std::fs;
use std::path::{Path, PathBuf};

use rankdcg::cli::{run_from, EXIT_INPUT, EXIT_MISMATCH, EXIT_OK, EXIT_ORACLE};
use tempfile::TempDir;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("rankdcg").chain(args.iter().copied());
    let code = run_from(argv, &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

const REFERENCE: &str = "id,rank\nx01,9\nx02,4\nx03,4\nx04,2\nx05,2\nx06,2\nx07,1\nx08,1\nx09,1\nx10,1\n";

fn setup() -> (TempDir, PathBuf) {
    let dir = TempDir::new().unwrap();
    let r = write(dir.path(), "ref.csv", REFERENCE);
    (dir, r)
}

#[test]
fn evaluate_ideal_and_reverse() {
    let (dir, r) = setup();
    let ideal = write(
        dir.path(),
        "ideal.txt",
        "x01\nx02\nx03\nx04\nx05\nx06\nx07\nx08\nx09\nx10\n",
    );
    let rev = write(
        dir.path(),
        "rev.txt",
        "x10\nx09\nx08\nx07\nx06\nx05\nx04\nx03\nx02\nx01\n",
    );
    let o = run(&[
        "evaluate",
        "-r",
        r.to_str().unwrap(),
        "-H",
        ideal.to_str().unwrap(),
        "-H",
        rev.to_str().unwrap(),
        "--metrics",
        "rankdcg,tau-b",
        "--format",
        "csv",
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let lines: Vec<&str> = o.stdout.lines().collect();
    assert_eq!(lines[0], "name,rankdcg,tau-b");
    assert!(lines[1].starts_with("ideal.txt,1,1"), "{}", lines[1]);
    assert!(lines[2].starts_with("rev.txt,0,"), "{}", lines[2]);
}

#[test]
fn constant_scores_give_nan_tau() {
    let (dir, r) = setup();
    let mut scores = String::from("id,score\n");
    for i in 1..=10 {
        scores.push_str(&format!("x{i:02},0.5\n"));
    }
    let h = write(dir.path(), "const.csv", &scores);
    let o = run(&[
        "evaluate",
        "-r",
        r.to_str().unwrap(),
        "-H",
        h.to_str().unwrap(),
        "--metrics",
        "rankdcg,tau-b",
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let row = o.stdout.lines().nth(1).unwrap();
    assert!(row.contains("0.0") && row.ends_with("nan"), "{row}");
}

#[test]
fn missing_id_exits_with_mismatch() {
    let (dir, r) = setup();
    let h = write(dir.path(), "short.txt", "x01\nx02\n");
    let o = run(&["evaluate", "-r", r.to_str().unwrap(), "-H", h.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_MISMATCH);
    assert!(o.stderr.starts_with("error:"));
}

#[test]
fn parse_error_and_bad_metric_exit_with_input_error() {
    let (dir, r) = setup();
    let bad = write(dir.path(), "bad.csv", "id,rank\nx01,high\n");
    let h = write(dir.path(), "h.txt", "x01\n");
    let o = run(&["evaluate", "-r", bad.to_str().unwrap(), "-H", h.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_INPUT);
    assert!(o.stderr.contains("line 2"), "{}", o.stderr);

    let ideal = write(
        dir.path(),
        "ideal.txt",
        "x01\nx02\nx03\nx04\nx05\nx06\nx07\nx08\nx09\nx10\n",
    );
    let o = run(&[
        "evaluate",
        "-r",
        r.to_str().unwrap(),
        "-H",
        ideal.to_str().unwrap(),
        "--metrics",
        "rankdcg,spearman",
    ]);
    assert_eq!(o.code, EXIT_INPUT);
    assert!(o.stdout.is_empty());

    assert_eq!(run(&["evaluate", "--bogus"]).code, EXIT_INPUT);
}

#[test]
fn curves_lists_every_position() {
    let o = run(&["curves", "--ranks", "9,4,4,2,2,2,1,1,1,1", "--variant", "rankdcg"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let lines: Vec<&str> = o.stdout.lines().collect();
    assert_eq!(lines[0], "position,variant,cost");
    assert_eq!(lines.len(), 11);
    assert!(lines[1].starts_with("1,rankdcg,4"), "{}", lines[1]);

    let all = run(&["curves", "--ranks", "3,2,1"]);
    assert_eq!(all.stdout.lines().count(), 1 + 3 * 4);
}

#[test]
fn synth_reverse_matches_last_row() {
    let dir = TempDir::new().unwrap();
    let r = dir.path().join("ref.csv");
    let h = dir.path().join("hyp.txt");
    let o = run(&[
        "synth",
        "--constructed",
        "9,4,4,2,2,2,1,1,1,1",
        "--perturb",
        "reverse",
        "--out",
        r.to_str().unwrap(),
        "--hyp-out",
        h.to_str().unwrap(),
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let reference = rankdcg::io::read_reference(&r).unwrap();
    let order: Vec<String> = fs::read_to_string(&h)
        .unwrap()
        .lines()
        .map(str::to_string)
        .collect();
    let ranks: Vec<u64> = order
        .iter()
        .map(|id| reference.rank(reference.index_of(id).unwrap()))
        .collect();
    assert_eq!(ranks, [1, 1, 1, 1, 2, 2, 2, 4, 4, 9]);

    let o = run(&[
        "evaluate",
        "-r",
        r.to_str().unwrap(),
        "-H",
        h.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["rows"][0]["scores"]["rankdcg"], 0.0);
}

#[test]
fn synth_random_needs_seed_and_is_reproducible() {
    let o = run(&["synth", "--power-law", "1.5", "--n", "50"]);
    assert_eq!(o.code, EXIT_INPUT);
    assert!(o.stderr.contains("seed"), "{}", o.stderr);

    let args = ["synth", "--power-law", "1.5", "--n", "50", "--seed", "42"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.code, EXIT_OK, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout.lines().count(), 51);
    assert_ne!(
        a.stdout,
        run(&["synth", "--power-law", "1.5", "--n", "50", "--seed", "43"]).stdout
    );
}

#[test]
fn synth_sweep_is_byte_identical() {
    let args = [
        "synth",
        "--uniform",
        "5",
        "--n",
        "30",
        "--seed",
        "3",
        "--sweep",
        "adjacent-swaps",
        "--steps",
        "4",
    ];
    let a = run(&args);
    assert_eq!(a.code, EXIT_OK, "{}", a.stderr);
    assert_eq!(a.stdout, run(&args).stdout);
    assert!(a.stdout.starts_with("step,metric,score\n"));
    assert!(a.stdout.contains("\n0,rankdcg,1\n"), "{}", a.stdout);
}

#[test]
fn oracle_check_replay_and_instances() {
    let o = run(&["oracle-check", "--table1"]);
    assert_eq!(o.code, EXIT_OK, "{}{}", o.stdout, o.stderr);
    assert_eq!(o.stdout.lines().filter(|l| l.starts_with("PASS")).count(), 7);

    let o = run(&["oracle-check", "--ranks", "3,2,2,1"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stdout);

    // [4,4,3] has a score-0 ordering that is not non-decreasing
    let o = run(&["oracle-check", "--ranks", "4,4,3"]);
    assert_eq!(o.code, EXIT_ORACLE);
    assert!(o.stdout.contains("zero-iff-non-decreasing"), "{}", o.stdout);

    let o = run(&["oracle-check", "--ranks", "1,2,3,4,5,6,7,8,9,10,11"]);
    assert_eq!(o.code, EXIT_INPUT);
}
