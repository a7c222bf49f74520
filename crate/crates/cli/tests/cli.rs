use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use csp_digraph::format::{parse_digraph, parse_structure, structure_to_json};
use csp_digraph::selftest::{example7, one_element, two_cycle, WORKED_EXAMPLE_STAGE3A};
use csp_digraph::structures::RelationalStructure;
use tempfile::TempDir;

const ZIGZAG: &str = r#"{"domain":["00","01","10","11"],"relations":[{"name":"E","arity":2,"tuples":[["00","01"],["10","01"],["10","11"]]}]}"#;

fn cspd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cspd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn put(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn put_structure(dir: &TempDir, name: &str, a: &RelationalStructure) -> PathBuf {
    put(dir, name, &structure_to_json(a))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_reports_counts() {
    let dir = TempDir::new().unwrap();
    for (name, a, counts) in [
        ("c2.json", two_cycle(), (24, 24)),
        ("one.json", one_element(), (4, 3)),
        ("ex7.json", example7(), (78, 80)),
    ] {
        let input = put_structure(&dir, name, &a);
        let out = cspd(&["build", "--input", s(&input)]);
        assert_eq!(out.status.code(), Some(0));
        let g = parse_digraph(&stdout(&out)).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), counts);
        let line = format!("vertices {} edges {} (formula {0} {1})", counts.0, counts.1);
        assert_eq!(stderr(&out).trim(), line);
    }
}

#[test]
fn build_writes_dot_and_sidecar_files() {
    let dir = TempDir::new().unwrap();
    let input = put_structure(&dir, "c2.json", &two_cycle());
    let dot = dir.path().join("g.dot");
    let side = dir.path().join("side.json");
    let out = cspd(&[
        "build",
        "--input",
        s(&input),
        "--format",
        "dot",
        "--output",
        s(&dot),
        "--sidecar",
        s(&side),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "vertices 24 edges 24 (formula 24 24)\n");
    let text = fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph G {"));
    assert_eq!(text.matches("->").count(), 24);
    let entries: Vec<serde_json::Value> =
        serde_json::from_str(&fs::read_to_string(&side).unwrap()).unwrap();
    assert_eq!(entries.len(), 24);
    assert_eq!(entries[0]["kind"], "element");
}

#[test]
fn forward_backward_and_solve_agree() {
    let dir = TempDir::new().unwrap();
    let template = put_structure(&dir, "c2.json", &two_cycle());
    let even = RelationalStructure::from_names(
        &["a", "b", "c", "d"],
        &[("E", &[&["a", "b"], &["b", "c"], &["c", "d"], &["d", "a"]])],
    )
    .unwrap();
    let odd = RelationalStructure::from_names(
        &["a", "b", "c"],
        &[("E", &[&["a", "b"], &["b", "c"], &["c", "a"]])],
    )
    .unwrap();
    for (name, x, solvable) in [("even.json", even, true), ("odd.json", odd, false)] {
        let input = put_structure(&dir, name, &x);
        let solved = cspd(&["solve", "--template", s(&template), "--input", s(&input)]);
        assert_eq!(solved.status.code(), Some(if solvable { 0 } else { 1 }));
        assert!(stdout(&solved).starts_with(if solvable { "YES" } else { "NO" }));

        let graph = dir.path().join(format!("{name}.digraph"));
        let fwd = cspd(&[
            "forward",
            "--template",
            s(&template),
            "--input",
            s(&input),
            "--output",
            s(&graph),
        ]);
        assert_eq!(fwd.status.code(), Some(0));

        let reduced = dir.path().join(format!("{name}.reduced"));
        let back = cspd(&[
            "backward",
            "--template",
            s(&template),
            "--input",
            s(&graph),
            "--output",
            s(&reduced),
        ]);
        assert_eq!(back.status.code(), Some(0), "{}", stderr(&back));
        let again = cspd(&["solve", "--template", s(&template), "--input", s(&reduced)]);
        assert_eq!(again.status.code(), solved.status.code());
    }
}

#[test]
fn backward_on_an_unbalanced_digraph_says_no() {
    let dir = TempDir::new().unwrap();
    let template = put_structure(&dir, "c2.json", &two_cycle());
    let g = put(
        &dir,
        "g.json",
        r#"{"vertices":["u","v","w"],"edges":[["u","v"],["v","w"],["u","w"]]}"#,
    );
    let out = cspd(&["backward", "--template", s(&template), "--input", s(&g)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("NO"));
}

#[test]
fn backward_from_the_worked_hyperedge_list() {
    let dir = TempDir::new().unwrap();
    let stage = put(&dir, "s3a.json", WORKED_EXAMPLE_STAGE3A);
    let out = cspd(&["backward", "--from-stage3a", s(&stage)]);
    assert_eq!(out.status.code(), Some(0));
    let b = parse_structure(&stdout(&out)).unwrap();
    assert_eq!(b.size(), 12);
    assert_eq!(b.relation("E").unwrap().len(), 8);
}

#[test]
fn poly_on_the_zigzag() {
    let dir = TempDir::new().unwrap();
    let z = put(&dir, "z.json", ZIGZAG);
    let ids = put(
        &dir,
        "maltsev.ids",
        "p(y,x,x) = y\np(x,x,y) = y\nidempotent p\n",
    );
    let out = cspd(&["poly", "--input", s(&z), "--identities", s(&ids)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "none\n");

    let out = cspd(&["poly", "--input", s(&z), "--library", "majority"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("found\nm {\"arity\":3"));

    let out = cspd(&["poly", "--input", s(&z), "--max-arity", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("wnu arity 3: found"));
}

#[test]
fn core_command() {
    let dir = TempDir::new().unwrap();
    let c2 = put_structure(&dir, "c2.json", &two_cycle());
    let out = cspd(&["core", "--input", s(&c2)]);
    assert_eq!(stdout(&out), "core\n");
    let z = put(&dir, "z.json", ZIGZAG);
    let out = cspd(&["core", "--input", s(&z)]);
    assert!(stdout(&out).starts_with("not a core (core has 2 of 4 elements)"));
}

#[test]
fn lift_wnu_verifies_and_majority_does_not() {
    let dir = TempDir::new().unwrap();
    let c2 = put_structure(&dir, "c2.json", &two_cycle());
    let out = cspd(&["lift", "--input", s(&c2), "--wnu", "3", "--verify"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("polymorphism w: 13824 edge tuples checked (exhaustive)\n"));
    assert!(text.contains("identities: hold"));

    let out = cspd(&[
        "lift",
        "--input",
        s(&c2),
        "--library",
        "majority",
        "--verify",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("violated at"));

    let out = cspd(&["lift", "--input", s(&c2), "--library", "tsi2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("none"));
}

#[test]
fn lift_writes_the_table() {
    let dir = TempDir::new().unwrap();
    let one = put_structure(&dir, "one.json", &one_element());
    let table = dir.path().join("table.txt");
    let out = cspd(&[
        "lift",
        "--input",
        s(&one),
        "--wnu",
        "3",
        "--format",
        "table",
        "--output",
        s(&table),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&table).unwrap();
    assert!(text.starts_with("w {\"arity\":3"));
}

#[test]
fn budget_exhaustion_has_its_own_exit_code() {
    let dir = TempDir::new().unwrap();
    let names = ["a", "b", "c", "d", "e"];
    let clique = |n: usize| {
        let mut edges = Vec::new();
        for u in &names[..n] {
            for v in &names[..n] {
                if u != v {
                    edges.push(format!("[\"{u}\",\"{v}\"]"));
                }
            }
        }
        let domain: Vec<String> = names[..n].iter().map(|x| format!("\"{x}\"")).collect();
        format!(
            r#"{{"domain":[{}],"relations":[{{"name":"E","arity":2,"tuples":[{}]}}]}}"#,
            domain.join(","),
            edges.join(",")
        )
    };
    let k5 = put(&dir, "k5.json", &clique(5));
    let k4 = put(&dir, "k4.json", &clique(4));
    let out = cspd(&[
        "solve",
        "--template",
        s(&k4),
        "--input",
        s(&k5),
        "--budget",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("budget"));
    let out = cspd(&["solve", "--template", s(&k4), "--input", s(&k5)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let c2 = put_structure(&dir, "c2.json", &two_cycle());
    assert_eq!(cspd(&["poly"]).status.code(), Some(2));
    let both = cspd(&[
        "poly",
        "--input",
        s(&c2),
        "--wnu",
        "3",
        "--library",
        "majority",
    ]);
    assert_eq!(both.status.code(), Some(2));
    let missing = cspd(&["core", "--input", s(&dir.path().join("absent.json"))]);
    assert_eq!(missing.status.code(), Some(2));
    let bad = cspd(&["build", "--input", s(&c2), "--format", "table"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn selftest_output_is_deterministic() {
    let first = cspd(&["selftest", "--criterion", "5", "--seed", "42"]);
    let second = cspd(&["selftest", "--criterion", "5", "--seed", "42"]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    assert!(stdout(&first).starts_with("PASS criterion  5 stage 3B on the worked example"));
}
