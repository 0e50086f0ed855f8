//! Spin a tesseract through the XT plane and watch its vertices enter and
//! leave the visible slab. Rotations pre-multiply, so each step turns the
//! view around the observer's own axes.

use std::f64::consts::PI;

use ndarray::Array2;
use ndswarm::slab::slab_mask;
use ndswarm::view::orthogonality_drift;
use ndswarm::{RotationPlane, SlabConfig, ViewState, K};

fn main() {
    // The 16 corners of the unit tesseract centred on the origin.
    let corners = Array2::from_shape_fn((K, 16), |(i, j)| if j >> i & 1 == 1 { 0.5 } else { -0.5 });
    let slab = SlabConfig::new(0.3, Default::default()).unwrap();

    let steps = 12;
    let mut view = ViewState::identity();
    for step in 0..=steps {
        let moved = view.apply(&corners).unwrap();
        let visible = slab_mask(&moved, &slab, &view).iter().filter(|v| **v).count();
        let bar = "#".repeat(visible);
        println!("{:>5.1}°  {visible:>2} visible  {bar}", step as f64 * 180.0 / steps as f64);
        view = view.rotate(RotationPlane::XT, PI / steps as f64);
    }

    // A long chain of small turns stays orthonormal.
    let mut v = ViewState::identity();
    for k in 0..100_000 {
        v = v.rotate(RotationPlane::ALL[k % 6], 0.01 * (k % 7) as f64);
    }
    println!("drift after 100k rotations: {:.2e}", orthogonality_drift(v.rotation()));
}
