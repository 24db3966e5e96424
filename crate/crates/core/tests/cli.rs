use std::path::PathBuf;
use std::process::{Command, Output};

fn ymesh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ymesh")).args(args).env_remove("YMESH_SEED").output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ymesh-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn exit_status_contract() {
    assert_eq!(ymesh(&["pin", "--pin", "pentagram"]).status.code(), Some(0));
    assert_eq!(ymesh(&["pin", "--pin", "no such pin"]).status.code(), Some(2));
    assert_eq!(ymesh(&["verify", "--pin", "pentagram", "--dim", "3"]).status.code(), Some(2));
    assert_eq!(ymesh(&["mesh", "gen", "--pin", "0,0 0,0 0,1 1,1"]).status.code(), Some(2));
    assert_eq!(ymesh(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn perturbed_mesh_fails_its_check() {
    let path = scratch("mesh.json");
    let p = path.to_str().unwrap();
    let gen = ymesh(&["mesh", "gen", "--pin", "pentagram", "--width", "10", "--steps", "2", "--seed", "4", "--out", p]);
    assert!(gen.status.success());
    assert_eq!(ymesh(&["mesh", "check", "--mesh", p]).status.code(), Some(0));
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let rows = v["rows"].as_array_mut().unwrap();
    rows.last_mut().unwrap()["points"][2][1] = "7/3".into();
    std::fs::write(&path, serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(ymesh(&["mesh", "check", "--mesh", p]).status.code(), Some(1));
}

#[test]
fn seeded_reports_are_identical() {
    let (a, b) = (scratch("a.json"), scratch("b.json"));
    for out in [&a, &b] {
        let o = ymesh(&["verify", "eqmain", "--pin", "gopher", "--seed", "42", "--report", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let from_env = Command::new(env!("CARGO_BIN_EXE_ymesh"))
        .args(["mesh", "gen", "--pin", "pentagram", "--width", "6"])
        .env("YMESH_SEED", "42")
        .output()
        .unwrap();
    let explicit = ymesh(&["mesh", "gen", "--pin", "pentagram", "--width", "6", "--seed", "42"]);
    assert_eq!(from_env.stdout, explicit.stdout);
}

#[test]
fn exports_are_well_formed() {
    let dot = scratch("q.dot");
    assert!(ymesh(&["export", "dot", "--pin", "rabbit", "--n", "5", "--out", dot.to_str().unwrap()]).status.success());
    assert!(ymesh::io::dot_is_well_formed(&std::fs::read_to_string(&dot).unwrap()));
    let trace = scratch("y.csv");
    assert!(ymesh(&["export", "ytrace", "--pin", "gopher", "--steps", "6", "--out", trace.to_str().unwrap()]).status.success());
    let y = ymesh::io::y_from_csv(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert!(!y.is_empty());
}
