//! Export a frame of politicians as a self-contained glTF scene, plus a
//! gallery of single faces that sweeps each visual feature.
//!
//! ```text
//! cargo run -p ndswarm --example gltf_export -- out/
//! ```

use std::path::PathBuf;

use ndswarm::dataset::{generate_synthetic, Archetype, SyntheticSpec};
use ndswarm::projection::project;
use ndswarm::scene::{build_frame, write_gltf, FramePoint, FrameSettings, GltfOptions, Lod};
use ndswarm::{AvatarParams, DimensionAssignment, SceneFrame, ViewState, VisualFeature};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    std::fs::create_dir_all(&out)?;

    let ds = generate_synthetic(&SyntheticSpec { archetype: Archetype::Politicians, n_points: 40, seed: 1 })?;
    let spec = serde_json::from_str(include_str!("../data/politicians-assignment.json"))?;
    let asgn = DimensionAssignment::from_spec(&spec, ds.names())?;
    let (_, projected) = project(&ds, &asgn)?;
    let frame = build_frame(&projected, &ViewState::identity(), &FrameSettings::default(), ds.labels(), 1)?;
    let swarm = out.join("politicians.gltf");
    write_gltf(&frame, &GltfOptions { lod: Lod::Medium, ..Default::default() }, &swarm)?;
    println!("{} avatars -> {}", frame.n_visible(), swarm.display());

    // One row per feature, low to high from left to right.
    let mut gallery = SceneFrame::empty(0, 0);
    for (row, feature) in VisualFeature::ALL.into_iter().enumerate() {
        for step in 0..5 {
            let value = step as f64 / 4.0;
            gallery.points.push(FramePoint {
                index: gallery.points.len(),
                position: [step as f64 * 0.4, -(row as f64) * 0.45, 0.0],
                depth: 0.0,
                params: AvatarParams::neutral().with(feature, value),
                label: Some(format!("{feature} {value}")),
            });
        }
    }
    gallery.n_total = gallery.points.len();
    let path = out.join("feature-gallery.gltf");
    write_gltf(&gallery, &GltfOptions { lod: Lod::High, ..Default::default() }, &path)?;
    println!("{} faces -> {}", gallery.n_total, path.display());
    Ok(())
}
