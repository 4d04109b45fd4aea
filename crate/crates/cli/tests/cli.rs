use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use aeip_core::compiler::{compile_ttori, flatten, SparseAffineSystem};
use aeip_core::gadget::{ConstraintSystem, Row};
use aeip_core::tiling::{find_periodic_tiling, TileSet};
use aeip_core::{AffineConstraint, InfoExpr, Rational, Rel, VarId, VarSet};
use tempfile::TempDir;

const MONO: &str = r#"{"colors":1,"tiles":[[1,1,1,1]]}"#;
const MISMATCH: &str = r#"{"colors":2,"tiles":[[1,2,2,2]]}"#;

fn aeip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aeip")).args(args).output().expect("binary runs")
}

fn put(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(aeip(&[]).status.code(), Some(2));
    assert_eq!(aeip(&["compile"]).status.code(), Some(2));
    assert_eq!(aeip(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn missing_tiling_exits_one() {
    let dir = TempDir::new().unwrap();
    let ts = put(&dir, "bad.json", MISMATCH);
    let out = aeip(&["tile-search", s(&ts)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("no periodic tiling up to period 6"), "{}", stderr(&out));
    let out = aeip(&["tile-search", s(&ts), "--max-period", "3"]);
    assert!(stderr(&out).contains("up to period 3"));
}

#[test]
fn unreadable_inputs_exit_one() {
    let dir = TempDir::new().unwrap();
    let junk = put(&dir, "junk.json", "{not json");
    assert_eq!(aeip(&["compile", s(&junk)]).status.code(), Some(1));
    assert_eq!(aeip(&["compile", s(&dir.path().join("absent.json"))]).status.code(), Some(1));
}

#[test]
fn unknown_emit_form_exits_two() {
    let dir = TempDir::new().unwrap();
    let sas = put(&dir, "s.json", &SparseAffineSystem { var_names: vec![], rows: vec![] }.to_json());
    let out = aeip(&["emit", s(&sas), "--form", "sideways"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compile_matches_the_library_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let ts = put(&dir, "mono.json", MONO);
    let a = aeip(&["compile", s(&ts)]);
    let b = aeip(&["--jobs", "1", "compile", s(&ts)]);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let lib = compile_ttori(&TileSet::from_json(MONO).unwrap()).unwrap().to_json();
    assert_eq!(String::from_utf8(a.stdout).unwrap(), lib);
}

#[test]
fn tile_search_writes_the_library_tiling() {
    let dir = TempDir::new().unwrap();
    let ts = put(&dir, "cb.json", r#"{"colors":2,"tiles":[[1,1,2,2],[2,2,1,1]]}"#);
    let out_path = dir.path().join("til.json");
    let out = aeip(&["tile-search", s(&ts), "--render", "-o", s(&out_path)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let lib = find_periodic_tiling(&TileSet::from_json(&fs::read_to_string(&ts).unwrap()).unwrap(), 6).unwrap();
    assert_eq!(fs::read_to_string(&out_path).unwrap(), lib.to_json());
    assert!(stderr(&out).contains(&lib.render()));
}

#[test]
fn refute_reports_status() {
    let dir = TempDir::new().unwrap();
    let a = VarSet::of([VarId::new("A")]);
    let rows = vec![
        Row::new(AffineConstraint::new(InfoExpr::entropy(a.clone()), Rel::Ge, Rational::one()), "lo"),
        Row::new(AffineConstraint::new(InfoExpr::entropy(a), Rel::Le, Rational::new(1, 2)), "hi"),
    ];
    let cs = ConstraintSystem::from_rows(vec![VarId::new("A")], rows).unwrap();
    let p = put(&dir, "bad.json", &flatten(&cs).to_json());
    let out = aeip(&["refute", s(&p)]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("REFUTED"));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["status"], "REFUTED");
    assert!(json["certificate"]["multipliers"].as_array().is_some_and(|m| !m.is_empty()));
}

#[test]
fn monochrome_pipeline() {
    let dir = TempDir::new().unwrap();
    let ts = put(&dir, "mono.json", MONO);
    let [cs, til, joint, sas] = ["cs.json", "til.json", "joint.json", "sas.json"].map(|n| dir.path().join(n));
    for args in [
        vec!["compile", s(&ts), "-o", s(&cs)],
        vec!["tile-search", s(&ts), "-o", s(&til)],
        vec!["witness", s(&ts), s(&til), "-o", s(&joint)],
        vec!["flatten", s(&cs), "-o", s(&sas)],
    ] {
        let out = aeip(&args);
        assert!(out.status.success(), "{args:?}: {}", stderr(&out));
    }
    let out = aeip(&["verify", s(&joint), s(&cs), "--tol", "1e-6"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stderr(&out).contains(" 0 failures"));
    let out = aeip(&["verify", s(&joint), s(&sas), "--tol", "1e-6"]);
    assert!(out.status.success(), "{}", stderr(&out));

    // the same witness misses a system that caps H(W1) below its value
    let w1 = VarId::new("TTORI.r.W1");
    let cap = Row::new(AffineConstraint::new(InfoExpr::entropy(VarSet::of([w1.clone()])), Rel::Le, Rational::new(1, 2)), "cap");
    let capped = put(&dir, "capped.json", &ConstraintSystem::from_rows(vec![w1], vec![cap]).unwrap().to_json());
    let out = aeip(&["verify", s(&joint), s(&capped)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("1 failures"), "{}", stderr(&out));
}

#[test]
fn emit_renders_text() {
    let dir = TempDir::new().unwrap();
    let ts = put(&dir, "mono.json", MONO);
    let cs = dir.path().join("cs.json");
    let ci = dir.path().join("ci.json");
    assert!(aeip(&["compile", s(&ts), "-o", s(&cs)]).status.success());
    let out = aeip(&["ci-only", s(&cs), "-o", s(&ci)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let out = aeip(&["emit", s(&ci), "--form", "cond-affine", "--text"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(String::from_utf8_lossy(&out.stdout).contains("implies"));
}
