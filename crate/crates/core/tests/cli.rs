use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quasicheese"))
        .args(args)
        .env("QUASICHEESE_THREADS", "1")
        .output()
        .expect("spawn quasicheese")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn doc(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_check_render_round_trip() {
    let dir = TempDir::new().unwrap();
    let cheese = dir.path().join("cheese.json");
    let report = dir.path().join("report.json");
    let o = run(&[
        "--format", "doc", "--reproducible", "cheese", "build", "--delta", "0.05", "--out", s(&cheese),
        "--report", s(&report),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rep: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["passed"], Value::Bool(true));
    assert!(rep.get("generated_unix").is_none());

    let holes = serde_json::from_str::<Value>(&fs::read_to_string(&cheese).unwrap()).unwrap()["holes"]
        .as_array()
        .unwrap()
        .len();
    assert!(holes > 10);

    let o = run(&["--format", "doc", "cheese", "check", s(&cheese)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(doc(&o)["passed"], Value::Bool(true));

    let svg = dir.path().join("cheese.svg");
    let o = run(&["cheese", "render", s(&cheese), "--out", s(&svg), "--overlay", "0.5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<?xml"));
    assert!(text.trim_end().ends_with("</svg>"));
    assert_eq!(text.matches("<g").count(), text.matches("</g>").count());
    // outer disk, every hole and the overlay
    assert_eq!(text.matches("<circle").count(), holes + 2);
}

#[test]
fn reproducible_output_is_byte_identical() {
    let args = ["--format", "doc", "--reproducible", "cohen", "verify", "--alpha", "0.05", "--K", "200"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(doc(&a).get("generated_unix").is_none());

    let stamped = run(&["--format", "doc", "cohen", "verify", "--alpha", "0.05", "--K", "200"]);
    assert!(doc(&stamped).get("generated_unix").is_some());
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();

    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["cheese", "check", "/nonexistent/cheese.json"])), 1);

    let overlapping = write(
        &dir,
        "overlap.json",
        r#"{"outer": {"center": [0, 0], "radius": 1},
            "holes": [{"center": [0.1, 0], "radius": 0.3}, {"center": [-0.1, 0], "radius": 0.3}]}"#,
    );
    assert_eq!(code(&run(&["cheese", "check", &overlapping])), 2);

    assert_eq!(code(&run(&["cheese", "frobnicate"])), 64);
    assert_eq!(code(&run(&["cheese", "build", "--k-probe", "5", "--out", "x.json"])), 64);
    assert_eq!(code(&run(&["cohen", "verify", "--alpha", "0.2", "--K", "10"])), 64);

    let broken = write(&dir, "broken.json", "{\"outer\": [");
    assert_eq!(code(&run(&["cheese", "check", &broken])), 65);
    assert_eq!(code(&run(&["seq", "dc", "--values", "1,-2,3"])), 65);
}

#[test]
fn sequence_and_cohen_commands() {
    let o = run(&["--format", "doc", "seq", "dc", "--family", "factorial", "--N", "1000"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("DIVERGENT_EVIDENCE"), "{text}");

    let o = run(&["seq", "minorant", "--values", "1,10,2"]);
    assert_eq!(code(&o), 0);

    let o = run(&["--format", "doc", "cohen", "certify", "--family", "factorial", "--N", "40000", "--s", "1", "--n", "30000"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(doc(&o)["passed"], Value::Bool(true));
}

#[test]
fn path_integral_of_inverse_around_circle() {
    let dir = TempDir::new().unwrap();
    let path = write(
        &dir,
        "circle.json",
        r#"{"segments": [{"kind": "arc", "center": [0, 0], "radius": 1,
            "angle_start": 0, "angle_end": 6.283185307179586, "orientation": 1}]}"#,
    );
    let f = write(&dir, "inv.json", r#"{"num": [[1, 0]], "den": [[0, 0], [1, 0]]}"#);
    let o = run(&["--format", "doc", "path", "integrate", "--path", &path, "--f", &f]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = &doc(&o)["result"]["value"];
    assert!(v[0].as_f64().unwrap().abs() < 1e-9);
    assert!((v[1].as_f64().unwrap() - 2.0 * std::f64::consts::PI).abs() < 1e-9);

    let o = run(&["path", "info", "--path", &path]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("segments 1"));
}

#[test]
fn certify_rational_functions() {
    let dir = TempDir::new().unwrap();
    let cheese = dir.path().join("cheese.json");
    assert_eq!(code(&run(&["cheese", "build", "--delta", "0.05", "--out", s(&cheese)])), 0);

    let f = write(&dir, "f.json", r#"{"num": [[1, 0]], "den": [[-2, 0], [1, 0]]}"#);
    let o = run(&[
        "--format", "doc", "certify", "--rational", &f, "--cheese", s(&cheese), "--delta", "0.05",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(doc(&o)["passed"], Value::Bool(true));

    // the cheese file must match the construction parameters
    let o = run(&["certify", "--rational", &f, "--cheese", s(&cheese), "--delta", "0.02"]);
    assert_eq!(code(&o), 2);

    let pole = write(&dir, "pole.json", r#"{"num": [[1, 0]], "den": [[-0.5, 0], [1, 0]]}"#);
    assert_eq!(code(&run(&["certify", "--rational", &pole, "--delta", "0.05"])), 2);
}
