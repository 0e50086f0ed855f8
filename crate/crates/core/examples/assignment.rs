//! Describe which dimensions drive position, which drive the face, and which
//! get folded into principal components. Shows a valid assignment and the
//! violations reported for a broken one.

use ndswarm::assignment::AssignmentSpec;
use ndswarm::dataset::{generate_synthetic, Archetype, SyntheticSpec};
use ndswarm::{DimensionAssignment, SpatialAxis, VisualFeature};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ds = generate_synthetic(&SyntheticSpec { archetype: Archetype::Politicians, n_points: 12, seed: 0 })?;

    let spec = AssignmentSpec::new()
        .spatial("sympathy", SpatialAxis::X)
        .spatial("economic_views", SpatialAxis::Y)
        .spatial("social_views", SpatialAxis::Z)
        .visual("promises", VisualFeature::SkinColor)
        .visual("fulfillment", VisualFeature::NoseLength)
        .visual("popularity", VisualFeature::Smile)
        .visual("group_numeric", VisualFeature::HairColor)
        .anonymous("media_activity")
        .anonymous("voting_effectiveness")
        .anonymous("age");
    println!("{}", serde_json::to_string_pretty(&spec)?);

    let asgn = DimensionAssignment::from_spec(&spec, ds.names())?;
    asgn.validate(ds.dims()).map_err(|v| format!("{v:?}"))?;
    for (dim, name) in ds.names().iter().enumerate() {
        println!("{name:<22} {:?}", asgn.category(dim));
    }
    println!("{:?}", asgn.counts());

    // Two dimensions fighting over the same axis, and one over the same feature.
    let broken = AssignmentSpec::new()
        .spatial("sympathy", SpatialAxis::X)
        .spatial("age", SpatialAxis::X)
        .visual("promises", VisualFeature::Smile)
        .visual("popularity", VisualFeature::Smile);
    let asgn = DimensionAssignment::from_spec(&broken, ds.names())?;
    if let Err(violations) = asgn.validate(ds.dims()) {
        for v in violations {
            println!("rejected: {v}");
        }
    }
    Ok(())
}
