//! CLI contract tests: exit codes, subcommand round trips, file outputs.

use std::path::PathBuf;
use std::process::Command;

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_flmig"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    if dir.exists() {
        std::fs::remove_dir_all(&dir).unwrap();
    }
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn karate() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../datasets/karate.txt")
}

#[test]
fn exit_codes_follow_the_contract() {
    // 0: success
    let ok = cli().args(["run", "--seed", "1"]).arg("--graph").arg(karate()).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));

    // 1: usage errors (bad flags, bad ranges, missing dataset choice)
    let usage = cli().args(["run"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(1));
    let usage = cli().args(["definitely-not-a-subcommand"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(1));
    let usage = cli()
        .args(["run", "--beta", "1.5"])
        .arg("--graph")
        .arg(karate())
        .output()
        .unwrap();
    assert_eq!(usage.status.code(), Some(1));

    // 2: data errors (missing or malformed files)
    let data = cli().args(["run", "--graph", "/no/such/file"]).output().unwrap();
    assert_eq!(data.status.code(), Some(2));
    let dir = scratch("cli_bad");
    let bad = dir.join("bad.txt");
    std::fs::write(&bad, "0 1\n1 2 zzz\n").unwrap();
    let data = cli().args(["run"]).arg("--graph").arg(&bad).output().unwrap();
    assert_eq!(data.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&data.stderr);
    assert!(stderr.contains("line 2"), "stderr: {stderr}");
}

#[test]
fn run_writes_membership_and_trace_that_rescore() {
    let dir = scratch("cli_run");
    let membership = dir.join("membership.txt");
    let trace = dir.join("trace.csv");
    let out = cli()
        .args(["run", "--seed", "5"])
        .arg("--graph")
        .arg(karate())
        .arg("--out")
        .arg(&membership)
        .arg("--trace")
        .arg(&trace)
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let q_line = stdout.lines().find(|l| l.starts_with("q_best")).unwrap();
    let q_reported: f64 = q_line.split('\t').nth(1).unwrap().parse().unwrap();

    // score the emitted membership file; it must reproduce the reported Q
    let score = cli()
        .args(["score"])
        .arg("--graph")
        .arg(karate())
        .arg("--partition")
        .arg(&membership)
        .output()
        .unwrap();
    assert!(score.status.success());
    let stdout = String::from_utf8(score.stdout).unwrap();
    let scored: f64 = stdout
        .lines()
        .find(|l| l.starts_with("q"))
        .unwrap()
        .split('\t')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(scored, q_reported);

    let trace_text = std::fs::read_to_string(&trace).unwrap();
    assert!(trace_text.starts_with("iteration,elapsed_s,Q_current,Q_best,temperature\n"));
    let mut last_elapsed = -1.0;
    let mut last_best = f64::NEG_INFINITY;
    for line in trace_text.lines().skip(1) {
        let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        assert!(fields[1] >= last_elapsed, "elapsed_s must be non-decreasing");
        assert!(fields[3] >= last_best, "Q_best must be non-decreasing");
        last_elapsed = fields[1];
        last_best = fields[3];
    }
}

#[test]
fn gen_gn_output_feeds_back_into_run_and_score() {
    let dir = scratch("cli_gn");
    let graph = dir.join("gn.txt");
    let truth = dir.join("gn_truth.txt");
    let gen = cli()
        .args(["gen-gn", "--mixing", "0.1", "--seed", "9"])
        .arg("--out")
        .arg(&graph)
        .arg("--truth")
        .arg(&truth)
        .output()
        .unwrap();
    assert!(gen.status.success());

    let run = cli()
        .args(["run", "--weighted", "--seed", "4"])
        .arg("--graph")
        .arg(&graph)
        .arg("--ground-truth")
        .arg(&truth)
        .output()
        .unwrap();
    assert!(run.status.success());
    let stdout = String::from_utf8(run.stdout).unwrap();
    let nmi_line = stdout.lines().find(|l| l.starts_with("nmi")).unwrap();
    let score: f64 = nmi_line.split('\t').nth(1).unwrap().parse().unwrap();
    assert_eq!(score, 1.0, "u=0.1 instance must be fully recovered");
}

#[test]
fn lfr_pair_loads_and_scores_against_its_own_truth() {
    let datasets = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../datasets");
    let out = cli()
        .args(["run", "--algorithm", "louvain", "--seed", "8"])
        .arg("--lfr-network")
        .arg(datasets.join("lfr_n1000_u02.network.dat"))
        .arg("--lfr-community")
        .arg(datasets.join("lfr_n1000_u02.community.dat"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("nmi\t"), "LFR truth implies an NMI line: {stdout}");
}

#[test]
fn wall_timing_changes_only_time_columns() {
    let dir_a = scratch("cli_wall_a");
    let dir_b = scratch("cli_wall_b");
    for (dir, timing) in [(&dir_a, "virtual"), (&dir_b, "wall")] {
        let out = cli()
            .args(["bench", "--runs", "2", "--seed", "11", "--timing", timing])
            .arg("--graph")
            .arg(karate())
            .arg("--out")
            .arg(dir)
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    let a = std::fs::read_to_string(dir_a.join("summary.txt")).unwrap();
    let b = std::fs::read_to_string(dir_b.join("summary.txt")).unwrap();
    assert_ne!(a, b);
    // strip the timing header line and the last (time_s) column of run rows
    let strip = |text: &str| -> Vec<String> {
        text.lines()
            .filter(|l| !l.starts_with("timing\t"))
            .map(|l| {
                if l.chars().next().is_some_and(|c| c.is_ascii_digit()) {
                    l.rsplit_once('\t').unwrap().0.to_string()
                } else {
                    l.to_string()
                }
            })
            .collect()
    };
    assert_eq!(strip(&a), strip(&b), "only timing content may differ");
}
