use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use lnn::dataset::synthetic_mushroom;
use lnn::fixtures::ANIMAL_RULES;
use lnn::rules::{canonicalize, parse_rule_file, EncodingPolicy};
use tempfile::TempDir;

fn lnn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lnn"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn animal_net(dir: &TempDir, policy: &str) -> PathBuf {
    let rules = write(dir, "animals.rules", ANIMAL_RULES);
    let net = dir.path().join(format!("animals-{policy}.json"));
    let o = lnn(&[
        "build",
        "--rules",
        s(&rules),
        "--policy",
        policy,
        "--out",
        s(&net),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("built 14 rules"));
    net
}

#[test]
fn version_and_help() {
    let v = lnn(&["--version"]);
    assert!(v.status.success());
    assert!(stdout(&v).starts_with("lnn "));
    let h = lnn(&["--help"]);
    assert!(h.status.success());
    for cmd in [
        "build",
        "infer",
        "readout",
        "remove-rule",
        "memorize",
        "gates",
        "neurule-demo",
        "export-dot",
    ] {
        assert!(stdout(&h).contains(cmd), "{cmd} missing from help");
    }
}

#[test]
fn build_then_readout_is_canonical() {
    let dir = TempDir::new().unwrap();
    for (flag, policy) in [
        ("inhibitor", EncodingPolicy::AsInhibitor),
        ("terminal", EncodingPolicy::AsTerminal),
    ] {
        let net = animal_net(&dir, flag);
        let o = lnn(&["readout", "--net", s(&net), "--policy", flag]);
        assert!(o.status.success());
        let expected = canonicalize(&parse_rule_file(ANIMAL_RULES).unwrap(), policy).to_string();
        assert_eq!(stdout(&o), expected);
    }
}

#[test]
fn infer_animal_facts() {
    let dir = TempDir::new().unwrap();
    let net = animal_net(&dir, "inhibitor");
    let facts = write(&dir, "facts.txt", "mammal=true\npredator=true\n");
    let o = lnn(&[
        "infer",
        "--net",
        s(&net),
        "--facts",
        s(&facts),
        "--trace",
        "--explain",
        "beast",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.lines().any(|l| l == "beast=true"));
    assert!(out.lines().any(|l| l == "ungulate=unknown"));
    assert!(out.contains("contradictions: none"));
    assert!(out.contains("round\tlink\tneuron\tvalue"));
    assert!(out.contains("beast=true via e"));
}

#[test]
fn facts_from_stdin() {
    let dir = TempDir::new().unwrap();
    let net = animal_net(&dir, "inhibitor");
    let mut child = Command::new(env!("CARGO_BIN_EXE_lnn"))
        .args(["infer", "--net", s(&net), "--facts", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"hair=true\npredator=true\nyellow=true\nspots=true\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success());
    assert!(stdout(&o).lines().any(|l| l == "leopard=true"));
}

#[test]
fn strict_mode_exit_code() {
    let dir = TempDir::new().unwrap();
    let rules = write(&dir, "r.rules", "if a then b\nif a then not b\n");
    let net = dir.path().join("n.json");
    assert!(lnn(&["build", "--rules", s(&rules), "--out", s(&net)])
        .status
        .success());
    let facts = write(&dir, "f.txt", "a=true\n");
    let relaxed = lnn(&["infer", "--net", s(&net), "--facts", s(&facts)]);
    assert_eq!(relaxed.status.code(), Some(0));
    assert!(stdout(&relaxed).contains("contradictions: b"));
    let strict = lnn(&["infer", "--net", s(&net), "--facts", s(&facts), "--strict"]);
    assert_eq!(strict.status.code(), Some(2));
}

#[test]
fn remove_rule_round_trip() {
    let dir = TempDir::new().unwrap();
    let net = animal_net(&dir, "inhibitor");
    let out = dir.path().join("smaller.json");
    let rule = "if mammal, predator then beast";
    let o = lnn(&["remove-rule", "--net", s(&net), "--rule", rule, "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let listing = stdout(&lnn(&["readout", "--net", s(&out)]));
    assert_eq!(listing.lines().count(), 13);
    assert!(!listing.contains(rule));

    let back = dir.path().join("back.json");
    let o = lnn(&["add-rule", "--net", s(&out), "--rule", rule, "--out", s(&back)]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&lnn(&["readout", "--net", s(&back)])),
        stdout(&lnn(&["readout", "--net", s(&net)]))
    );

    let missing = lnn(&["remove-rule", "--net", s(&out), "--rule", rule, "--out", s(&out)]);
    assert!(!missing.status.success());
    assert!(stderr(&missing).contains("not present"), "{}", stderr(&missing));
}

#[test]
fn errors_go_to_stderr() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.rules", "if a then b\nif a b then c\n");
    let o = lnn(&[
        "build",
        "--rules",
        s(&bad),
        "--out",
        s(&dir.path().join("x.json")),
    ]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("at 2:6"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let o = lnn(&["readout", "--net", "/nonexistent/net.json"]);
    assert!(!o.status.success());
    assert!(stderr(&o).starts_with("error:"));
}

#[test]
fn gates_report() {
    let o = lnn(&["gates"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.ends_with(": PASS")).count(), 6);
    assert!(out.contains("XOR: 3 neurons (layered XOR network: 7)"));
    let one = stdout(&lnn(&["gates", "--gate", "xnor"]));
    assert_eq!(one.lines().filter(|l| l.ends_with(": PASS")).count(), 1);
    assert!(!lnn(&["gates", "--gate", "imply"]).status.success());
}

#[test]
fn neurule_demo_report() {
    let o = lnn(&["neurule-demo"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("R7.1   sum=   7.2  represented"));
    assert!(out.contains("night-pain factor 19.6: fails R7.1 R7.3"));
}

#[test]
fn memorize_reports_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "mushroom.data", &synthetic_mushroom(120, 9));
    let run = |tag: &str| {
        let report = dir.path().join(format!("{tag}.txt"));
        let csv = dir.path().join(format!("{tag}.csv"));
        let o = lnn(&[
            "memorize",
            "--dataset",
            "mushroom",
            "--file",
            s(&data),
            "--attrs",
            "10",
            "--records",
            "25",
            "--seed",
            "4",
            "--report",
            s(&report),
            "--csv",
            s(&csv),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).contains("final recall: 25/25"));
        (
            std::fs::read_to_string(report).unwrap(),
            std::fs::read_to_string(csv).unwrap(),
        )
    };
    let (a, b) = (run("a"), run("b"));
    assert_eq!(a, b);
    assert!(a.1.starts_with("step,recalled,total,contradictions\n1,1,1,0\n"));
    assert_eq!(a.1.lines().count(), 26);

    let too_many = lnn(&[
        "memorize",
        "--dataset",
        "mushroom",
        "--file",
        s(&data),
        "--records",
        "500",
        "--report",
        s(&dir.path().join("r.txt")),
    ]);
    assert!(!too_many.status.success());
}

#[test]
fn memorize_spect_filters() {
    let dir = TempDir::new().unwrap();
    let row = |c: &str, bits: &str| {
        let mut cols = vec![c.to_string()];
        cols.extend(bits.chars().map(String::from));
        cols.join(",")
    };
    let text = [
        row("1", "1010101010101010101010"),
        row("0", "1010101010101010101010"),
        row("0", "0000000000000000000000"),
    ]
    .join("\n");
    let data = write(&dir, "spect.data", &text);
    let report = dir.path().join("r.txt");
    let o = lnn(&[
        "memorize",
        "--dataset",
        "spect",
        "--file",
        s(&data),
        "--report",
        s(&report),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("indecisive records dropped: 2"));
    assert!(stdout(&o).contains("final recall: 1/1"));
    let kept = lnn(&[
        "memorize",
        "--dataset",
        "spect",
        "--file",
        s(&data),
        "--report",
        s(&report),
        "--keep-indecisive",
    ]);
    assert!(stdout(&kept).contains("final recall: 1/3"));
    assert!(std::fs::read_to_string(&report)
        .unwrap()
        .contains("conflicting records: #1 #2"));
}

#[test]
fn export_dot() {
    let dir = TempDir::new().unwrap();
    let net = animal_net(&dir, "inhibitor");
    let dot = dir.path().join("a.dot");
    assert!(lnn(&["export-dot", "--net", s(&net), "--out", s(&dot)])
        .status
        .success());
    let text = std::fs::read_to_string(dot).unwrap();
    assert!(text.starts_with("digraph"));
    assert!(text.contains("arrowhead=tee"));
}
