use std::io::{BufRead, BufReader};
use std::net::TcpListener;
use std::path::Path;
use std::process::{Command, Output, Stdio};

const BIN: &str = env!("CARGO_BIN_EXE_friendrec");
const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/edges.csv");
const MIRRORED: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/mirrored.csv");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn annotate(edges: &str, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["annotate", "--edges", edges, "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn ingest_counts_and_rewrites() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("clean.csv");
    let res = run(&["ingest", "--edges", FIXTURE, "--out", out.to_str().unwrap()]);
    assert!(res.status.success());
    assert_eq!(stdout(&res), "34 rows\n");
    let written = std::fs::read_to_string(out).unwrap();
    assert!(written.starts_with("user,friend\n1,0\n0,1\n"));
    assert_eq!(written.lines().count(), 35);
}

#[test]
fn ingest_reports_bad_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "user,friend\n1,0\n2,x\n").unwrap();
    let res = run(&["ingest", "--edges", bad.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("line 3"));

    let res = run(&["ingest", "--edges", dir.path().join("missing.csv").to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn annotate_is_deterministic_and_echoes_default_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    let res = annotate(FIXTURE, &a, &[]);
    assert!(res.status.success());
    assert!(stdout(&res).starts_with("seed 42\n"));
    annotate(FIXTURE, &b, &["--seed", "42"]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let res = annotate(FIXTURE, &c, &["--seed", "7"]);
    assert!(stdout(&res).starts_with("seed 7\n"));
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn annotate_mirrored_pairs_share_books() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.csv");
    for seed in ["1", "2", "3", "42"] {
        assert!(annotate(MIRRORED, &out, &["--seed", seed]).status.success());
        let text = std::fs::read_to_string(&out).unwrap();
        let books: Vec<&str> = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
        assert_eq!(books.len(), 7);
        assert_eq!(books[0], books[1]);
        assert_eq!(books[2], books[3]);
        assert_eq!(books[4], books[5]);
    }
}

#[test]
fn annotate_with_custom_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let catalog = dir.path().join("books.txt");
    std::fs::write(&catalog, "# two books\nB3\nB8\n").unwrap();
    let out = dir.path().join("out.csv");
    let res = annotate(FIXTURE, &out, &["--catalog", catalog.to_str().unwrap()]);
    assert!(stdout(&res).contains("with 2 books"));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(",B3") || l.ends_with(",B8")));
}

#[test]
fn evaluate_table_and_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("a.csv");
    annotate(FIXTURE, &data, &[]);
    let data = data.to_str().unwrap();

    let res = run(&["evaluate", "--data", data, "--kmin", "1", "--kmax", "3"]);
    assert!(res.status.success());
    let text = stdout(&res);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "K VALUE  ACCURACY OBTAINED");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("1        ") && lines[1].ends_with('%'));
    assert!(lines[4].starts_with("chosen K: "));
    assert_eq!(text, stdout(&run(&["evaluate", "--data", data, "--kmin", "1", "--kmax", "3"])));

    // default range on 23 train rows: 2..=4
    let res = run(&["evaluate", "--data", data]);
    assert_eq!(stdout(&res).lines().count(), 5);

    assert_eq!(run(&["evaluate", "--data", data, "--kmin", "5", "--kmax", "2"]).status.code(), Some(2));
    assert_eq!(run(&["evaluate", "--data", data, "--kmin", "0", "--kmax", "2"]).status.code(), Some(2));
    assert_eq!(run(&["evaluate", "--data", data, "--ratio", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["evaluate"]).status.code(), Some(2));
}

#[test]
fn evaluate_writes_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("a.csv");
    let report = dir.path().join("r.json");
    annotate(FIXTURE, &data, &[]);
    let res = run(&[
        "evaluate",
        "--data",
        data.to_str().unwrap(),
        "--kmin",
        "2",
        "--kmax",
        "3",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(json["entries"].as_array().unwrap().len(), 2);
    assert_eq!(json["seed"], 42);
    assert_eq!(json["split_ratio"], 0.7);
}

#[test]
fn recommend_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("a.csv");
    annotate(FIXTURE, &data, &[]);
    let data = data.to_str().unwrap();

    let res = run(&["recommend", "--data", data, "--user", "0", "--k", "5", "--limit", "3"]);
    assert!(res.status.success());
    let text = stdout(&res);
    assert!(text.starts_with("USER"));
    assert!(text.lines().count() <= 4);
    // user 0 is friends with 1, 2, 3 and 7; none of them may be suggested
    for line in text.lines().skip(1) {
        let candidate: u64 = line.split_whitespace().next().unwrap().parse().unwrap();
        assert!(![0, 1, 2, 3, 7].contains(&candidate), "{line}");
    }

    let res = run(&["recommend", "--data", data, "--user", "77"]);
    assert_eq!(res.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&res.stderr).contains("unknown user 77"));

    assert_eq!(run(&["recommend", "--data", data, "--user", "0", "--k", "0"]).status.code(), Some(2));
    assert_eq!(run(&["recommend", "--data", data, "--user", "-1"]).status.code(), Some(2));
}

#[test]
fn recommend_cold_user_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("a.csv");
    // user 6 only appears as a friend, so has read nothing
    std::fs::write(&data, "user,friend,book\n5,6,B1\n4,5,B2\n").unwrap();
    let res = run(&["recommend", "--data", data.to_str().unwrap(), "--user", "6"]);
    assert_eq!(res.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&res.stderr).contains("no books read"));
}

#[test]
fn serve_reports_port_in_use() {
    let taken = TcpListener::bind("127.0.0.1:0").unwrap();
    let port = taken.local_addr().unwrap().port().to_string();
    let dir = tempfile::tempdir().unwrap();
    let res = Command::new(BIN)
        .args(["serve", "--port", &port, "--edges", FIXTURE, "--data-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(res.status.code(), Some(1));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("cannot listen on"), "{err}");
}

#[test]
fn serve_prints_address_and_port_env() {
    let dir = tempfile::tempdir().unwrap();
    let mut child = Command::new(BIN)
        .args(["serve", "--edges", FIXTURE])
        .env("PORT", "0")
        .env("DATA_DIR", dir.path())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stdout.take().unwrap()).read_line(&mut line).unwrap();
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(line.starts_with("listening on http://127.0.0.1:"), "{line}");
    assert!(line.contains("34 rows"));
    assert!(dir.path().join("meta.json").exists());
}
