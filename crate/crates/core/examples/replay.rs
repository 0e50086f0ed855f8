//! Record a session as a command log, replay it twice and confirm the
//! replies match byte for byte.

use ndswarm::session::{parse_log, replay, DatasetStore};

const LOG: &str = r#"
# twelve politicians, three anonymous traits folded into principal components
{"type":"load_dataset","source":{"synthetic":{"archetype":"politicians","n_points":12,"seed":4}}}
{"type":"set_assignment","assignment":{"sympathy":{"category":"spatial","target":"X"},"economic_views":{"category":"spatial","target":"Y"},"social_views":{"category":"spatial","target":"Z"},"promises":{"category":"visual","target":"Skin_C"},"popularity":{"category":"visual","target":"Smile"},"media_activity":{"category":"anonymous"},"age":{"category":"anonymous"}}}
{"type":"request_frame"}
{"type":"rotate","plane":"YT","angle":0.7}
{"type":"translate","delta":[0.0,0.5,0.0,-0.2]}
{"type":"set_slab","threshold":0.8,"mode":"post-view"}
{"type":"request_frame"}
{"type":"set_camera","distance":-3}
{"type":"get_pca_report"}
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let log = parse_log(LOG)?;
    let store = DatasetStore::new();
    let first = replay(&log, &store)?;
    let second = replay(&log, &store)?;

    for (cmd, reply) in log.iter().zip(&first) {
        let head = cmd.to_json().chars().take(48).collect::<String>();
        match reply {
            Ok(r) => println!("ok   {head:<48} -> {} bytes", r.len()),
            Err(e) => println!("err  {head:<48} -> {e}"),
        }
    }
    assert_eq!(first, second);
    println!("two replays agree on all {} replies", first.len());
    Ok(())
}
