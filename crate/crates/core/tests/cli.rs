use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_superhedge"))
        .args(args)
        .env_remove("SUPERHEDGE_VERTEX_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn trinomial_price_row() {
    let o = run(&["price", "--market", &fixture("t1.market"), "--claim", &fixture("t1_up.claim"), "--time", "0", "--format", "records"]);
    assert!(o.status.success());
    let line = stdout(&o);
    let rec: serde_json::Value = serde_json::from_str(line.lines().next().unwrap()).unwrap();
    assert_eq!(rec["lower"], "0/1");
    assert_eq!(rec["upper"], "1/3");
    assert_eq!(rec["interval"], "(0, 1/3)");
    assert_eq!(rec["attainable"], false);
}

#[test]
fn binomial_price_is_replicated() {
    let o = run(&["price", "--market", &fixture("b1.market"), "--claim", &fixture("b1_call.claim")]);
    assert!(o.status.success());
    let out = stdout(&o);
    let row = out.lines().find(|l| l.starts_with("r ")).unwrap();
    let cells: Vec<&str> = row.split_whitespace().collect();
    assert!(cells.contains(&"[1/3]"));
    assert!(cells.contains(&"yes"));
    assert!(cells.contains(&"2/3"));
}

#[test]
fn malformed_rational_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.claim");
    std::fs::write(&path, "# header\na 1\nm 1/0\nb 0\n").unwrap();
    let o = run(&["price", "--market", &fixture("t1.market"), "--claim", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn completeness_verdicts() {
    let o = run(&["complete", "--market", &fixture("b2.market"), "--time", "0"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("complete"));
    assert!(!stdout(&o).contains("incomplete"));

    let o = run(&["complete", "--market", &fixture("t1.market"), "--time", "0"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("incomplete at r"));

    let o = run(&["complete", "--market", &fixture("t1.market"), "--time", "1", "--format", "records"]);
    let rec: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(rec["complete"], true);
    assert_eq!(rec["pasting"], true);
}

#[test]
fn decomposition_tables() {
    let o = run(&["decompose", "--market", &fixture("t1.market"), "--process", &fixture("t1_super.process"), "--format", "records"]);
    assert!(o.status.success());
    let recs: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let c: Vec<&str> = recs.iter().map(|r| r["c"].as_str().unwrap()).collect();
    assert_eq!(c, ["0/1", "0/1", "1/3", "0/1"]);
    assert_eq!(recs[0]["xi"], "2/3");

    let o = run(&["decompose", "--market", &fixture("t1.market"), "--process", &fixture("t1_under.process")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not a supermartingale at node `r`"));
}

#[test]
fn property_suite_passes_on_fixtures() {
    let o = run(&["check", "--market", &fixture("t1.market"), "--seed", "42", "--claims", "100"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));

    let o = run(&["check", "--market", &fixture("b2.market"), "--seed", "7", "--claims", "20", "--format", "records"]);
    assert!(o.status.success());
    let linear: Vec<serde_json::Value> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
        .filter(|r| r["name"] == "linearity")
        .collect();
    assert_eq!(linear.len(), 3);
    assert!(linear.iter().all(|r| r["detail"].as_str().unwrap().starts_with("linear")));
}

#[test]
fn sampling_is_deterministic_and_exact() {
    let a = run(&["emm-sample", "--market", &fixture("t2.market"), "--seed", "9", "--format", "records"]);
    let b = run(&["emm-sample", "--market", &fixture("t2.market"), "--seed", "9", "--format", "records"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    for line in stdout(&a).lines() {
        let rec: serde_json::Value = serde_json::from_str(line).unwrap();
        let q = rec["q"].as_str().unwrap();
        assert!(superhedge::rational::parse_rational(q).is_ok(), "{q}");
    }
    let p = run(&["paste", "--market", &fixture("t2.market"), "--seed", "1", "--seed2", "2", "--time", "1"]);
    assert!(p.status.success());
    assert!(stdout(&p).contains("[paste]"));
}

#[test]
fn vertex_cap_comes_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_superhedge"))
        .args(["emm-sample", "--market", &fixture("t1.market")])
        .env("SUPERHEDGE_VERTEX_CAP", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap 2"));
}

#[test]
fn arbitrage_is_reported_first() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("arb.market");
    std::fs::write(&path, "horizon 1\nassets 1\nnode r - 1\nnode u r 2\nnode d r 3/2\nweight u 1/2\nweight d 1/2\n").unwrap();
    let o = run(&["complete", "--market", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("arbitrage at node `r`"));
}
