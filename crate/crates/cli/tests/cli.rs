use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use jsonschema::JSONSchema;
use serde_json::Value;

const TREFOIL: &str = "X[1,5,2,4],X[3,1,4,6],X[5,3,6,2]";

fn root() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn data(name: &str) -> PathBuf {
    root().join("data").join(name)
}

fn knot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_knot"))
        .args(args)
        .env_remove("KNOT_BUDGET")
        .output()
        .expect("binary runs")
}

fn knot_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_knot"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("not json ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn validate(schema: &str, v: &Value) {
    let text = std::fs::read_to_string(root().join("schemas").join(schema)).unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    let compiled = JSONSchema::compile(&schema).expect("schema compiles");
    let msgs: Vec<String> = match compiled.validate(v) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    panic!("{schema} rejects output: {msgs:?}");
}

fn trefoil_file() -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "{TREFOIL}").unwrap();
    f
}

#[test]
fn fraction_eval_and_expand() {
    let out = knot(&["fraction", "eval", "[2,3]"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "7/3");
    let out = knot(&["fraction", "expand", "7/3"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "[2,3]");
    let out = knot(&["--format", "json", "fraction", "tangle", "[2,3]"]);
    let v = json(&out);
    validate("fraction.schema.json", &v);
    assert_eq!(v["fraction"], "7/3");
}

#[test]
fn domain_errors_exit_one_with_json() {
    let out = knot(&["fraction", "eval", "[2,1,-1]"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    validate("error.schema.json", &v);
    assert_eq!(v["error"]["kind"], "FractionError");

    let out = knot_stdin(&["analyze", "-"], "X[1,2,3]");
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"]["kind"], "DiagramError");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(knot(&["bogus"]).status.code(), Some(2));
    assert_eq!(knot(&["analyze"]).status.code(), Some(2));
    let out = knot(&["analyze", "/nonexistent/diagram.pd"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert!(out.stdout.is_empty());
}

#[test]
fn analyze_trefoil() {
    let f = trefoil_file();
    let v = json(&knot(&["analyze", f.path().to_str().unwrap()]));
    validate("analyze.schema.json", &v);
    assert_eq!(v["crossings"], 3);
    assert_eq!(v["decomposition"]["canonical_circles"].as_array().unwrap().len(), 0);
    let regions = v["decomposition"]["regions"].as_array().unwrap();
    assert_eq!(regions.len(), 1);
    assert_eq!(regions[0]["kind"], "TBD");
    assert_eq!(regions[0]["total_weight"].as_i64().unwrap().abs(), 3);
    assert_eq!(v["essential_tree"]["vertices"].as_array().unwrap().len(), 1);
}

#[test]
fn analyze_reads_stdin_and_renders_dot() {
    let v = json(&knot_stdin(&["analyze", "-"], TREFOIL));
    assert_eq!(v["crossings"], 3);
    let out = knot_stdin(&["render", "--tree", "canonical", "-"], TREFOIL);
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("graph") || dot.starts_with("digraph"), "{dot}");
    let out = knot_stdin(&["--format", "json", "render", "-"], TREFOIL);
    validate("tree.schema.json", &json(&out));
}

#[test]
fn periodicity_of_12a634_is_obstructed_by_atoms() {
    let pd = data("12a634.pd");
    let atoms = data("12a634-atoms.json");
    let out = knot(&["periodicity", "--q", "3", "--atoms", atoms.to_str().unwrap(), pd.to_str().unwrap()]);
    assert!(out.status.success());
    let v = json(&out);
    validate("periodicity.schema.json", &v);
    assert_eq!(v["verdict"], "obstructed");
    let reasons: Vec<&str> = v["reasons"].as_array().unwrap().iter().map(|r| r.as_str().unwrap()).collect();
    assert!(reasons.contains(&"AtomLemma"), "{reasons:?}");

    let v = json(&knot(&["periodicity", "--q", "5", pd.to_str().unwrap()]));
    assert_eq!(v["verdict"], "obstructed");
    assert!(v["reasons"].as_array().unwrap().iter().any(|r| r == "CrossingCount"));
}

#[test]
fn periodicity_of_trefoil_is_visible() {
    let f = trefoil_file();
    let v = json(&knot(&["periodicity", "--q", "3", f.path().to_str().unwrap()]));
    validate("periodicity.schema.json", &v);
    assert_eq!(v["verdict"], "visible");
    assert_eq!(v["witness"]["symmetry"]["order"], 3);
}

#[test]
fn symmetry_report_validates() {
    let f = trefoil_file();
    let v = json(&knot(&["symmetry", f.path().to_str().unwrap()]));
    validate("symmetry.schema.json", &v);
    assert_eq!(v["strict_orders"], serde_json::json!([3]));
    let v = json(&knot(&["symmetry", "--q", "2", f.path().to_str().unwrap()]));
    assert!(v["symmetries"].as_array().unwrap().is_empty());
}

#[test]
fn flype_subcommands_validate() {
    let pd = data("12a634.pd");
    let p = pd.to_str().unwrap();
    let list = json(&knot(&["flype", "list", p]));
    validate("flype.schema.json", &list);
    let closure = json(&knot(&["flype", "closure", p]));
    validate("flype.schema.json", &closure);
    assert!(closure["size"].as_u64().unwrap() >= 1);
    let orbits = json(&knot(&["flype", "orbits", p]));
    validate("flype.schema.json", &orbits);
    let eq = json(&knot(&["--strict", "flype", "equivalent", p, p]));
    validate("flype.schema.json", &eq);
    assert_eq!(eq["equivalent"], true);
    assert_eq!(eq["trees_isomorphic"], true);
    if !list["moves"].as_array().unwrap().is_empty() {
        let applied = json(&knot(&["flype", "apply", "--index", "0", p]));
        validate("flype.schema.json", &applied);
    }
    let out = knot(&["flype", "apply", "--index", "999", p]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn budget_from_environment_truncates_closure() {
    let pd = data("12a634.pd");
    let full = json(&knot(&["flype", "closure", pd.to_str().unwrap()]));
    if full["size"].as_u64().unwrap() < 2 {
        return;
    }
    let out = Command::new(env!("CARGO_BIN_EXE_knot"))
        .args(["flype", "closure", pd.to_str().unwrap()])
        .env("KNOT_BUDGET", "1")
        .output()
        .unwrap();
    let v = json(&out);
    assert_eq!(v["truncated"], true);
    assert_eq!(v["size"], 1);
    let flag = json(&knot(&["--budget", "1", "flype", "closure", pd.to_str().unwrap()]));
    assert_eq!(flag, v);
}

#[test]
fn output_is_deterministic() {
    let pd = data("12a634.pd");
    let args = ["analyze", pd.to_str().unwrap()];
    let a = knot(&args).stdout;
    let b = knot(&args).stdout;
    assert_eq!(a, b);
    let args = ["periodicity", "--q", "3", pd.to_str().unwrap()];
    assert_eq!(knot(&args).stdout, knot(&args).stdout);
}
