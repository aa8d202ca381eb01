use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("golden").join(name)
}

fn read_golden(name: &str) -> String {
    std::fs::read_to_string(golden(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nakajima"))
        .args(args)
        .env_remove("NAKAJIMA_NODE_CAP")
        .output()
        .expect("binary runs")
}

fn stdout_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} exited with {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8")
}

fn line_set(text: &str) -> BTreeSet<String> {
    text.lines().filter(|l| !l.is_empty()).map(str::to_string).collect()
}

/// Labelled edges `source \t label \t target` read back from DOT output.
fn dot_edges(dot: &str) -> BTreeSet<String> {
    let mut labels = std::collections::HashMap::new();
    let mut edges = BTreeSet::new();
    for line in dot.lines().map(str::trim) {
        let label = line.split("label=\"").nth(1).and_then(|s| s.split('"').next());
        if let Some((lhs, _)) = line.split_once(" [") {
            match lhs.split_once(" -> ") {
                Some((u, v)) => edges.insert((u.to_string(), label.unwrap().to_string(), v.to_string())),
                None => labels.insert(lhs.to_string(), label.unwrap().to_string()).is_some(),
            };
        }
    }
    edges.into_iter().map(|(u, i, v)| format!("{}\t{i}\t{}", labels[&u], labels[&v])).collect()
}

#[test]
fn table1_rows() {
    let out = stdout_ok(&["virtualize", "--folding", "F4-E6", "--seed", "Y(4,0)", "--emit", "table"]);
    assert_eq!(out.lines().count(), 26);
    assert_eq!(line_set(&out), line_set(&read_golden("table1_f4_e6.tsv")));
}

#[test]
fn figure1_left_graph() {
    let dot = stdout_ok(&["gen", "--type", "C3~", "--highest-weight", "L0", "--depth", "4", "--emit", "dot"]);
    assert_eq!(dot_edges(&dot), line_set(&read_golden("fig1_c3_affine_edges.tsv")));
    assert_eq!(dot.matches("[label=\"Y").count(), 8);
}

#[test]
fn figure1_right_graph() {
    let dot = stdout_ok(&[
        "virtualize", "--folding", "C3~-D5~", "--highest-weight", "L0", "--depth", "4", "--emit", "dot",
    ]);
    assert_eq!(dot_edges(&dot), line_set(&read_golden("fig1_d5_affine_image_edges.tsv")));
}

#[test]
fn section6_brackets_and_operators() {
    let alpha = read_golden("section6_alpha.txt");
    let alpha = alpha.trim();
    let out = stdout_ok(&["kostant", "--n", "3", "--partition", alpha, "--brackets"]);
    assert_eq!(out, read_golden("section6_brackets.txt"));
    let expected = read_golden("section6_f.txt");
    for (i, line) in expected.lines().enumerate() {
        let op = format!("f{}", i + 1);
        let out = stdout_ok(&["kostant", "--n", "3", "--partition", alpha, "--apply", &op]);
        assert_eq!(out.trim_end(), line, "{op}");
    }
}

#[test]
fn section7_mutation_matrix() {
    let c = golden("section7_c.json");
    let out = stdout_ok(&["mutate", "--c", c.to_str().unwrap(), "--m", "0,0,1,2"]);
    assert_eq!(out, read_golden("section7_mutation.txt"));
    let out = stdout_ok(&["mutate", "--c", c.to_str().unwrap(), "--reorient", "--type", "B4"]);
    assert!(out.starts_with("m = (0, 0, 1, 2)\n"));
    assert!(out.ends_with(&read_golden("section7_mutation.txt")));
    let out = stdout_ok(&["mutate", "--c", c.to_str().unwrap(), "--m", "0,0,1,2", "--type", "B4", "--monomial", "Y(3,0)"]);
    assert_eq!(out, "Y(3,1)\n");
}

#[test]
fn stembridge_check_passes() {
    let out = stdout_ok(&["check", "--suite", "stembridge", "--type", "A3", "--highest-weight", "L1+L2", "--depth", "full"]);
    assert_eq!(out, "stembridge: pass (20 nodes)\n");
}

#[test]
fn kostant_round_trip_through_the_cli() {
    let m = stdout_ok(&["from-kostant", "--n", "3", "--partition", "2*(a[1,3]) + (a[2])"]);
    let back = stdout_ok(&["to-kostant", "--n", "3", "--monomial", m.trim()]);
    assert_eq!(back, "(a[2]) + 2*(a[1,3])\n");
    let json = stdout_ok(&["to-kostant", "--n", "3", "--monomial", m.trim(), "--emit", "json"]);
    assert_eq!(json, "{\"n\":3,\"mult\":[[1,3,2],[2,2,1]]}\n");
}

#[test]
fn lusztig_data_output() {
    let alpha = read_golden("section6_alpha.txt");
    let out = stdout_ok(&["lusztig", "--n", "3", "--partition", alpha.trim()]);
    assert_eq!(out, "2,3,2,0,2,5\n");
    let out = stdout_ok(&["lusztig", "--folding", "C2-A3", "--data", "1,2,3,4", "--word", "1,2,1,2"]);
    assert_eq!(out, "word: 1,3,2,1,3,2\ndata: 1,1,4,3,3,8\n");
}

#[test]
fn output_is_deterministic() {
    let args = ["gen", "--type", "A3", "--highest-weight", "L1+L3", "--depth", "full", "--emit", "json"];
    assert_eq!(stdout_ok(&args), stdout_ok(&args));
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| run(args).status.code();
    assert_eq!(code(&["gen", "--type", "Q9", "--highest-weight", "L1", "--depth", "1"]), Some(1));
    assert_eq!(code(&["gen", "--type", "A2", "--seed", "Y(1,0", "--depth", "1"]), Some(1));
    assert_eq!(code(&["to-kostant", "--n", "2", "--monomial", "Y(1,0)"]), Some(1));
    assert_eq!(code(&["kostant", "--n", "2", "--partition", "0", "--apply", "e1"]), Some(1));
    assert_eq!(code(&["gen", "--type", "A2", "--depth", "1"]), Some(2));
    assert_eq!(code(&["gen", "--type", "A2", "--highest-weight", "L1"]), Some(2));
    assert_eq!(code(&["frobnicate"]), Some(2));
}

#[test]
fn node_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_nakajima"))
        .args(["gen", "--type", "A3", "--highest-weight", "L2", "--depth", "full"])
        .env("NAKAJIMA_NODE_CAP", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("node cap of 3"));
    let capped = stdout_ok(&["gen", "--type", "A3", "--highest-weight", "L2", "--depth", "full", "--cap", "6"]);
    assert!(capped.contains("n5 "));
}
