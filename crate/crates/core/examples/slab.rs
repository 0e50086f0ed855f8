//! How slab thickness controls how many wines stay on screen, in both
//! normal conventions.

use std::path::PathBuf;

use ndswarm::dataset::load_csv;
use ndswarm::projection::project;
use ndswarm::slab::slab_mask;
use ndswarm::{DimensionAssignment, LoadOptions, RotationPlane, SlabConfig, SlabMode, ViewState};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let ds = load_csv(data.join("winequality-red.csv"), &LoadOptions::default())?;
    let spec = serde_json::from_str(&std::fs::read_to_string(data.join("wine-assignment.json"))?)?;
    let asgn = DimensionAssignment::from_spec(&spec, ds.names())?;
    let (_, projected) = project(&ds, &asgn)?;

    let view = ViewState::identity().rotate(RotationPlane::ZT, 0.5).translate([0.0, 0.0, 0.0, 0.25]);
    let moved = view.apply(&projected.spatial)?;
    println!("{:>9} {:>10} {:>10}", "threshold", "post-view", "pre-view");
    for threshold in [0.1, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0] {
        let post = SlabConfig::new(threshold, SlabMode::PostView)?;
        let pre = SlabConfig::new(threshold, SlabMode::PreView)?;
        let n_post = slab_mask(&moved, &post, &view).iter().filter(|v| **v).count();
        let n_pre = slab_mask(&projected.spatial, &pre, &view).iter().filter(|v| **v).count();
        println!("{threshold:>9} {n_post:>10} {n_pre:>10}");
    }
    println!("of {} points; pre-view ignores the T offset of the view", ds.len());
    Ok(())
}
