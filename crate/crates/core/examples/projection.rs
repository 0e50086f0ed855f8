//! Build the filtering matrix for the politicians dataset and show which
//! output row each input dimension lands in.

use ndswarm::dataset::{generate_synthetic, Archetype, SyntheticSpec};
use ndswarm::projection::{project, RowKind};
use ndswarm::{DimensionAssignment, SpatialAxis, VisualFeature, K};

fn row_name(r: usize) -> String {
    if r < K {
        SpatialAxis::from_index(r).unwrap().to_string()
    } else {
        VisualFeature::from_index(r - K).unwrap().to_string()
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ds = generate_synthetic(&SyntheticSpec { archetype: Archetype::Politicians, n_points: 12, seed: 0 })?;
    let spec = serde_json::from_str(include_str!("../data/politicians-assignment.json"))?;
    let asgn = DimensionAssignment::from_spec(&spec, ds.names())?;
    let (filter, projected) = project(&ds, &asgn)?;

    let short: Vec<String> = ds.names().iter().map(|n| n.chars().take(7).collect()).collect();
    print!("{:<12}{:<8}", "row", "kind");
    for s in &short {
        print!(" {s:>7}");
    }
    println!();
    for (r, kind) in filter.row_kinds().iter().enumerate() {
        let tag = match kind {
            RowKind::Spatial(_) | RowKind::Visual(_) => "one-hot".to_string(),
            RowKind::PcaComponent(k) => format!("pc{}", k + 1),
            RowKind::Empty => "empty".to_string(),
        };
        print!("{:<12}{tag:<8}", row_name(r));
        for c in 0..ds.dims() {
            print!(" {:>7.3}", filter.matrix()[[r, c]]);
        }
        println!();
    }

    println!("\nstandardized spatial coordinates of the first three points:");
    for j in 0..3 {
        let p: Vec<String> = (0..K).map(|i| format!("{:+.3}", projected.spatial[[i, j]])).collect();
        println!("  {:<16} [{}]", ds.labels().unwrap()[j], p.join(", "));
    }
    Ok(())
}
