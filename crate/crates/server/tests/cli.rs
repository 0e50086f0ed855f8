use std::path::PathBuf;
use std::process::{Command, Output};

fn ndswarm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ndswarm")).args(args).output().unwrap()
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name).display().to_string()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn inspect_prints_every_dimension() {
    let text = stdout(&ndswarm(&["inspect", &data("winequality-red.csv")]));
    for name in ["fixed acidity", "sulphates", "quality"] {
        assert!(text.contains(name), "{text}");
    }
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&ndswarm(&["inspect", "--json", &data("winequality-red.csv")]))).unwrap();
    assert!(json.to_string().contains("1599"));
}

#[test]
fn project_is_deterministic() {
    let args = [
        "project",
        &data("winequality-red.csv"),
        "--assign",
        &data("wine-assignment.json"),
        "--rotate",
        "XT=30",
        "--rotate",
        "YZ=-15",
        "--translate",
        "-0.1,0,0.2,0",
        "--slab-threshold",
        "0.8",
    ];
    let a = stdout(&ndswarm(&args));
    let b = stdout(&ndswarm(&args));
    assert_eq!(a, b);
    let frame = ndswarm::SceneFrame::from_json(a.trim()).unwrap();
    assert_eq!(frame.n_total, 1599);
    assert!(frame.n_visible() > 0 && frame.n_visible() < 1599);
}

#[test]
fn synth_replay_and_gltf() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("pol.csv");
    stdout(&ndswarm(&["synth", "--archetype", "politicians", "--n", "12", "--seed", "3", "--out", csv.to_str().unwrap()]));
    let ds = ndswarm::dataset::load_csv(&csv, &ndswarm::LoadOptions::default().with_label_column("name")).unwrap();
    assert_eq!((ds.dims(), ds.len()), (10, 12));

    let gltf = dir.path().join("pol.gltf");
    stdout(&ndswarm(&[
        "export-gltf",
        csv.to_str().unwrap(),
        "--label-column",
        "name",
        "--assign",
        &data("politicians-assignment.json"),
        "--lod",
        "medium",
        "--out",
        gltf.to_str().unwrap(),
    ]));
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(&gltf).unwrap()).unwrap();
    assert_eq!(doc["asset"]["version"], "2.0");

    let log = dir.path().join("session.jsonl");
    std::fs::write(
        &log,
        format!(
            "{}\n{{\"type\":\"set_assignment\",\"assignment\":{}}}\n{{\"type\":\"request_frame\"}}\n",
            serde_json::json!({"type": "load_dataset", "source": {"csv": {"path": csv, "label_column": "name"}}}),
            std::fs::read_to_string(data("politicians-assignment.json")).unwrap().replace('\n', ""),
        ),
    )
    .unwrap();
    let first = stdout(&ndswarm(&["replay", log.to_str().unwrap()]));
    assert_eq!(first, stdout(&ndswarm(&["replay", log.to_str().unwrap()])));
    assert_eq!(first.lines().count(), 3);
    assert!(first.lines().last().unwrap().contains("\"n_total\":12"));
}

#[test]
fn pca_report_and_errors() {
    let text = stdout(&ndswarm(&[
        "pca-report",
        &data("winequality-red.csv"),
        "--assign",
        &data("wine-pca-assignment.json"),
    ]));
    assert!(text.contains("chlorides"), "{text}");

    let bad = ndswarm(&["project", &data("winequality-red.csv"), "--assign", "/nonexistent.json"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("nonexistent"));
    let bad = ndswarm(&["project", &data("winequality-red.csv"), "--assign", &data("wine-assignment.json"), "--rotate", "XQ=1"]);
    assert!(!bad.status.success());
}
