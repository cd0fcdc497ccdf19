use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

fn qsolve(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_qsolve"));
    c.args(args).env_remove("QSOLVE_TIMEOUT");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().unwrap()
}

fn qbench(dir: &Path, args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_qbench"))
        .current_dir(dir)
        .args(args)
        .env_remove("QSOLVE_TIMEOUT")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "qbench {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn first_line(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout)
        .lines()
        .next()
        .unwrap_or("")
        .to_string()
}

fn stat(o: &Output, key: &str) -> String {
    let text = String::from_utf8_lossy(&o.stdout);
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")).map(str::to_string))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
}

#[test]
fn answers_and_exit_codes() {
    let f = fixture("ematch_example.smt2");
    let o = qsolve(&[f.to_str().unwrap()], &[]);
    assert_eq!(first_line(&o), "unsat");
    assert_eq!(o.status.code(), Some(0));

    let f = fixture("finite_sat.smt2");
    let o = qsolve(&[f.to_str().unwrap(), "--full-saturate-quant"], &[]);
    assert_eq!(first_line(&o), "sat");
    assert_eq!(o.status.code(), Some(0));

    let o = qsolve(&[f.to_str().unwrap()], &[]);
    assert_eq!(first_line(&o), "unknown");
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn errors_print_unknown() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.smt2");
    std::fs::write(&bad, "(assert (p").unwrap();
    let good = fixture("ematch_example.smt2");
    for args in [
        vec![bad.to_str().unwrap()],
        vec!["/nonexistent/file.smt2"],
        vec![good.to_str().unwrap(), "--ml-model", "/nonexistent"],
    ] {
        let o = qsolve(&args, &[]);
        assert_eq!(first_line(&o), "unknown", "{args:?}");
        assert_eq!(o.status.code(), Some(1));
        assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    }
}

#[test]
fn stats_block() {
    let f = fixture("ematch_example.smt2");
    let o = qsolve(&[f.to_str().unwrap(), "--stats"], &[]);
    assert_eq!(first_line(&o), "unsat");
    assert_eq!(stat(&o, "status"), "unsat");
    let lemmas: u64 = stat(&o, "lemmas").parse().unwrap();
    let used: u64 = stat(&o, "used_lemmas").parse().unwrap();
    assert!(used >= 1 && used <= lemmas);
    assert_eq!(stat(&o, "predictions"), "0");
}

#[test]
fn timeout_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    qbench(
        dir.path(),
        &["gen-needle", "--n", "1", "--m", "60", "--seed", "3", "--out", "c"],
    );
    let p = dir.path().join("c/needle-0.smt2");
    let p = p.to_str().unwrap();
    let o = qsolve(
        &[p, "--stats", "--max-lemmas", "100000000", "--max-rounds", "100000000"],
        &[("QSOLVE_TIMEOUT", "0.000001")],
    );
    assert_eq!(first_line(&o), "unknown");
    assert_eq!(stat(&o, "reason"), "timeout");
    assert_eq!(o.status.code(), Some(1));

    let o = qsolve(&[p], &[("QSOLVE_TIMEOUT", "-1")]);
    assert_eq!(first_line(&o), "unknown");
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn dump_instantiations_appends_rows() {
    let dir = tempfile::tempdir().unwrap();
    let rows = dir.path().join("rows.txt");
    let f = fixture("ematch_example.smt2");
    let args = [f.to_str().unwrap(), "--dump-instantiations", rows.to_str().unwrap()];
    qsolve(&args, &[]);
    let once = std::fs::read_to_string(&rows).unwrap();
    assert!(!once.trim().is_empty());
    qsolve(&args, &[]);
    let twice = std::fs::read_to_string(&rows).unwrap();
    assert_eq!(twice.len(), 2 * once.len());
}

#[test]
fn run_twice_gives_identical_results() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    qbench(
        d,
        &["gen-needle", "--n", "12", "--m", "10", "--seed", "5", "--out", "c"],
    );
    for out in ["a.csv", "b.csv"] {
        qbench(
            d,
            &[
                "run",
                "--corpus",
                "c",
                "--only",
                "ematch,enum",
                "--max-lemmas",
                "60",
                "--timeout",
                "30",
                "--out",
                out,
            ],
        );
    }
    let a = std::fs::read(d.join("a.csv")).unwrap();
    assert_eq!(a, std::fs::read(d.join("b.csv")).unwrap());
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 1 + 2 * 12);
}

#[test]
fn full_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    qbench(
        d,
        &["gen-needle", "--n", "40", "--m", "30", "--seed", "7", "--out", "c"],
    );
    qbench(d, &["split", "--corpus", "c", "--seed", "1", "--out", "s"]);
    for part in ["train", "dev", "holdout"] {
        assert!(d.join(format!("s/{part}.txt")).exists());
    }
    let budget = ["--only", "ematch", "--max-lemmas", "60", "--timeout", "30"];
    for (list, out) in [("s/train.txt", "train.rows"), ("s/dev.txt", "dev.rows")] {
        let mut a = vec!["label", "--corpus", "c", "--problems", list, "--out", out];
        a.extend(budget);
        qbench(d, &a);
    }
    let msg = qbench(
        d,
        &[
            "train",
            "--data",
            "train.rows",
            "--dev",
            "dev.rows",
            "--out",
            "m.txt",
            "--importance",
            "imp.csv",
        ],
    );
    assert!(msg.contains("selected candidate"));
    assert!(std::fs::read_to_string(d.join("m.txt"))
        .unwrap()
        .starts_with("QGBDT v1"));
    assert!(std::fs::read_to_string(d.join("imp.csv"))
        .unwrap()
        .starts_with("feature,"));

    let mut a = vec![
        "run",
        "--corpus",
        "c",
        "--model",
        "m.txt",
        "--out",
        "r.csv",
        "--timings",
        "t.csv",
    ];
    a.extend(budget);
    qbench(d, &a);
    let cover = qbench(d, &["cover", "--results", "r.csv", "--k", "2"]);
    assert!(cover.starts_with("| strategy |"));
    let transfer = qbench(
        d,
        &[
            "transfer",
            "--results",
            "r.csv",
            "--strategies",
            "ematch",
            "--models",
            "m",
        ],
    );
    assert!(transfer.contains("| ematch |"));
    let scatter = qbench(
        d,
        &[
            "scatter",
            "--results",
            "r.csv",
            "--timings",
            "t.csv",
            "--s1",
            "ematch",
            "--s2",
            "ematch@m",
            "--timeout",
            "30",
        ],
    );
    assert_eq!(scatter.lines().count(), 41);
}
