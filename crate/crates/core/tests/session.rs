mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::sync::Arc;

use ndswarm::dataset::{Archetype, SyntheticSpec};
use ndswarm::projection::project;
use ndswarm::session::{parse_log, replay, DatasetSource, DatasetStore, Reply, SessionError, Workspace};
use ndswarm::{Command, RotationPlane, Session, VisualFeature};
use serde_json::json;

fn cmd(value: serde_json::Value) -> Command {
    Command::from_json(&value.to_string()).unwrap()
}

fn wine_session() -> (Session, DatasetStore) {
    let mut store = DatasetStore::new();
    let id = store.insert(common::wine());
    (Session::new("s", store.get(&id).unwrap()), store)
}

fn assign(file: &str) -> Command {
    Command::SetAssignment { assignment: common::assignment_spec(file) }
}

#[test]
fn workspace_sessions_on_wine() {
    let mut ws = Workspace::new();
    let ds = ws.datasets.insert(common::wine());
    let a = ws.create_session(&ds).unwrap();
    let b = ws.create_session(&ds).unwrap();
    assert_ne!(a, b);
    let summary = ws.session(&a).unwrap().summary();
    assert_eq!((summary.dataset.n_total, summary.dataset.n), (1599, 12));
    assert_eq!(summary.next_seq, 1);
    assert!(summary.counts.is_none());
    assert!(matches!(ws.create_session("nope"), Err(SessionError::UnknownDataset(_))));
    assert!(matches!(ws.dispatch("nope", &Command::RequestFrame), Err(SessionError::UnknownSession(_))));

    // Sessions sharing a dataset do not share state.
    ws.dispatch(&a, &cmd(json!({"type": "rotate", "plane": "XY", "angle": 1.0}))).unwrap();
    assert_eq!(ws.session(&b).unwrap().version(), 0);
    assert!(Arc::ptr_eq(ws.session(&a).unwrap().dataset(), ws.session(&b).unwrap().dataset()));
}

#[test]
fn frame_requires_assignment() {
    let (mut s, store) = wine_session();
    let err = s.dispatch(&Command::RequestFrame, &store).unwrap_err();
    assert!(matches!(err, SessionError::AssignmentRequired));
    assert_eq!(err.to_string(), "assignment required");
    assert_eq!(s.summary().next_seq, 1);
}

#[test]
fn failed_commands_leave_state_untouched() {
    let (mut s, store) = wine_session();
    s.dispatch(&assign("wine-assignment.json"), &store).unwrap();
    s.dispatch(&cmd(json!({"type": "rotate", "plane": "ZT", "angle": 0.3})), &store).unwrap();
    let before = s.summary();
    let pipeline = s.pipeline().cloned();

    let bad = [
        Command::Rotate { plane: RotationPlane::XY, angle: f64::NAN },
        cmd(json!({"type": "set_slab", "threshold": -1.0})),
        cmd(json!({"type": "set_camera", "distance": 0.0})),
        cmd(json!({"type": "set_assignment", "assignment": {"alcohol": {"category": "spatial", "target": "X"}, "pH": {"category": "spatial", "target": "X"}}})),
        cmd(json!({"type": "set_assignment", "assignment": {"vintage": {"category": "anonymous"}}})),
        cmd(json!({"type": "load_dataset", "source": {"registered": "ds-99"}})),
        cmd(json!({"type": "load_dataset", "source": {"csv": {"path": "/nonexistent/file.csv"}}})),
    ];
    for c in &bad {
        assert!(s.dispatch(c, &store).is_err(), "{c:?}");
        assert_eq!(s.summary(), before, "{c:?}");
        assert_eq!(s.pipeline().cloned(), pipeline);
    }
    assert!(Command::from_json(r#"{"type":"rotate","plane":"XW","angle":1}"#).is_err());
    assert!(Command::from_json(r#"{"type":"rotate","plane":"XY","angle":1,"extra":0}"#).is_err());
}

#[test]
fn cached_projection_matches_a_fresh_one() {
    let (mut s, store) = wine_session();
    for file in ["wine-assignment.json", "wine-pca-assignment.json", "wine-assignment.json"] {
        s.dispatch(&assign(file), &store).unwrap();
        let asgn = common::assignment(s.dataset(), file);
        let (filter, projected) = project(s.dataset(), &asgn).unwrap();
        let p = s.pipeline().unwrap();
        assert_eq!(p.assignment, asgn);
        assert_eq!(p.filter, filter);
        assert_eq!(p.projected, projected);
    }

    // Loading another dataset drops the cached projection.
    let pol = SyntheticSpec { archetype: Archetype::Politicians, n_points: 12, seed: 0 };
    s.dispatch(&Command::LoadDataset { source: DatasetSource::Synthetic(pol) }, &store).unwrap();
    assert!(s.pipeline().is_none());
    assert_eq!(s.summary().dataset.n_total, 12);
}

#[test]
fn rotations_accumulate() {
    let (mut s, store) = wine_session();
    let quarter = cmd(json!({"type": "rotate", "plane": "XY", "angle": FRAC_PI_4}));
    s.dispatch(&quarter, &store).unwrap();
    s.dispatch(&quarter, &store).unwrap();
    let expect = ndswarm::view::plane_rotation(RotationPlane::XY, FRAC_PI_2);
    for (a, b) in s.view().rotation().as_flattened().iter().zip(expect.as_flattened()) {
        assert!((a - b).abs() < 1e-9);
    }
    assert_eq!(s.version(), 2);

    s.dispatch(&cmd(json!({"type": "translate", "delta": [1.0, 0.0, 0.0, -0.5]})), &store).unwrap();
    s.dispatch(&cmd(json!({"type": "translate", "delta": [1.0, 2.0, 0.0, 0.0]})), &store).unwrap();
    assert_eq!(s.view().translation(), &[2.0, 2.0, 0.0, -0.5]);
}

#[test]
fn frames_advance_seq_only() {
    let (mut s, store) = wine_session();
    s.dispatch(&assign("wine-assignment.json"), &store).unwrap();
    let version = s.version();
    let Reply::Frame(first) = s.dispatch(&Command::RequestFrame, &store).unwrap() else { panic!() };
    let Reply::Frame(second) = s.dispatch(&Command::RequestFrame, &store).unwrap() else { panic!() };
    assert_eq!((first.seq, second.seq), (1, 2));
    assert_eq!(first.points, second.points);
    assert_eq!(first.n_total, 1599);
    assert_eq!(s.version(), version);
}

#[test]
fn politicians_session_drives_assigned_features() {
    let mut store = DatasetStore::new();
    let id = store.insert(common::politicians(12, 0));
    let mut s = Session::new("p", store.get(&id).unwrap());
    s.dispatch(&assign("politicians-assignment.json"), &store).unwrap();
    let counts = s.summary().counts.unwrap();
    assert_eq!((counts.h_s, counts.h_v, counts.h_a), (3, 4, 3));

    s.dispatch(&cmd(json!({"type": "set_slab", "threshold": 100.0})), &store).unwrap();
    s.dispatch(&cmd(json!({"type": "set_camera", "distance": 100.0})), &store).unwrap();
    let frame = s.frame().unwrap();
    assert_eq!(frame.n_visible(), 12);
    for f in [VisualFeature::SkinColor, VisualFeature::NoseLength, VisualFeature::Smile, VisualFeature::HairColor] {
        let vals: Vec<f64> = frame.points.iter().map(|p| p.params.get(f)).collect();
        let spread = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - vals.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread > 0.1, "{f} spread {spread}");
    }
    for f in [VisualFeature::Frown, VisualFeature::HairLength] {
        assert!(frame.points.iter().all(|p| p.params.get(f) == 0.5));
    }
}

#[test]
fn pca_report_through_session() {
    let (mut s, store) = wine_session();
    let report_cmd = cmd(json!({"type": "get_pca_report"}));
    assert!(matches!(s.dispatch(&report_cmd, &store), Err(SessionError::AssignmentRequired)));
    s.dispatch(&assign("wine-pca-assignment.json"), &store).unwrap();
    let version = s.version();
    let Reply::PcaReport(report) = s.dispatch(&report_cmd, &store).unwrap() else { panic!() };
    assert_eq!(report.names, ["chlorides", "free sulfur dioxide", "density"]);
    assert_eq!(report.loadings.len(), 3);
    let total: f64 = report.explained_variance.iter().sum();
    assert!((total - 1.0).abs() < 1e-9, "{total}");
    assert_eq!(s.version(), version);
}

#[test]
fn command_json_round_trip_and_replay() {
    let log_text = format!(
        "# wine session\n{}\n\n{}\n{}\n{}\n{}\n{}\n",
        json!({"type": "load_dataset", "source": {"csv": {"path": common::data_path("winequality-red.csv")}}}),
        json!({"type": "set_assignment", "assignment": common::assignment_spec("wine-assignment.json")}),
        json!({"type": "rotate", "plane": "YT", "angle": 0.2}),
        json!({"type": "set_slab", "threshold": 0.5, "mode": "pre-view"}),
        json!({"type": "request_frame"}),
        json!({"type": "set_camera", "distance": -1}),
    );
    let log = parse_log(&log_text).unwrap();
    assert_eq!(log.len(), 6);
    for c in &log {
        assert_eq!(&Command::from_json(&c.to_json()).unwrap(), c);
    }
    let store = DatasetStore::new();
    let a = replay(&log, &store).unwrap();
    let b = replay(&log, &store).unwrap();
    assert_eq!(a, b);
    assert!(a[..5].iter().all(Result::is_ok));
    assert!(a[5].is_err());
    assert!(a[4].as_ref().unwrap().starts_with(r#"{"seq":1,"n_total":1599,"#));

    assert!(replay(&log[1..], &store).is_err());
    assert!(parse_log("{\"type\":\"warp\"}").is_err());
}
