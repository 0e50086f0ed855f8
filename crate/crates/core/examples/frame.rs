//! Produce one canonical scene frame, the JSON a viewer would render.

use std::path::PathBuf;

use ndswarm::dataset::load_csv;
use ndswarm::{Command, LoadOptions, Session};
use ndswarm::session::{DatasetStore, Reply};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let mut store = DatasetStore::new();
    let id = store.insert(load_csv(data.join("winequality-red.csv"), &LoadOptions::default())?);
    let mut session = Session::new("example", store.get(&id).unwrap());

    let assignment = std::fs::read_to_string(data.join("wine-assignment.json"))?;
    for line in [
        format!(r#"{{"type":"set_assignment","assignment":{assignment}}}"#),
        r#"{"type":"rotate","plane":"XT","angle":0.4}"#.to_string(),
        r#"{"type":"set_slab","threshold":0.3}"#.to_string(),
    ] {
        session.dispatch(&Command::from_json(&line)?, &store)?;
    }

    let Reply::Frame(frame) = session.dispatch(&Command::RequestFrame, &store)? else {
        unreachable!()
    };
    eprintln!("{} of {} wines visible", frame.n_visible(), frame.n_total);
    for p in frame.points.iter().take(3) {
        let params: Vec<String> = p.params.values().iter().map(|v| format!("{v:.2}")).collect();
        eprintln!("  wine {:>4}  pos {:?}  params [{}]", p.index, p.position.map(|v| (v * 100.0).round() / 100.0), params.join(" "));
    }
    println!("{}", frame.to_json());
    Ok(())
}
