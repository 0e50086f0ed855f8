mod common;

use ndarray::{array, Array2};
use ndswarm::assignment::{Category, Counts, Violation};
use ndswarm::projection::{
    build_filter_matrix, pca_components, project, standardize, RowKind,
};
use ndswarm::{Dataset, DimensionAssignment, SpatialAxis, VisualFeature, K, M};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use Category::{Anonymous, Skipped, Spatial, Visual};

fn dataset(values: Array2<f64>) -> Dataset {
    let names = (0..values.nrows()).map(|i| format!("d{i}")).collect();
    Dataset::new(names, values, None, "test").unwrap()
}

#[test]
fn validation_examples() {
    let ok = DimensionAssignment::dense([
        Spatial(SpatialAxis::X),
        Spatial(SpatialAxis::Y),
        Visual(VisualFeature::SkinColor),
        Anonymous,
    ]);
    assert!(ok.validate(4).is_ok());

    let twice = DimensionAssignment::dense([Spatial(SpatialAxis::X), Spatial(SpatialAxis::X)]);
    let err = twice.validate(2).unwrap_err();
    assert_eq!(err, [Violation::AxisAssignedTwice { axis: SpatialAxis::X, dims: vec![0, 1] }]);
    assert_eq!(err[0].to_string(), "axis X assigned twice (dimensions 0, 1)");

    let five = DimensionAssignment::dense([
        Spatial(SpatialAxis::X),
        Spatial(SpatialAxis::Y),
        Visual(VisualFeature::SkinColor),
        Anonymous,
        Anonymous,
    ]);
    assert_eq!(five.counts(), Counts { h_s: 2, h_v: 1, h_a: 2, skipped: 0 });
    assert_eq!(DimensionAssignment::all_skipped(6).counts(), Counts { h_s: 0, h_v: 0, h_a: 0, skipped: 6 });
}

#[test]
fn bundled_assignment_files() {
    let pol = common::politicians(12, 0);
    let asgn = common::assignment(&pol, "politicians-assignment.json");
    assert!(asgn.validate(pol.dims()).is_ok());
    assert_eq!(asgn.counts(), Counts { h_s: 3, h_v: 4, h_a: 3, skipped: 0 });

    let wine = common::wine();
    let asgn = common::assignment(&wine, "wine-assignment.json");
    assert!(asgn.validate(12).is_ok());
    assert_eq!(asgn.counts(), Counts { h_s: 4, h_v: 3, h_a: 0, skipped: 5 });
}

proptest! {
    #[test]
    fn validation_ignores_declaration_order(
        cats in proptest::collection::vec(0usize..16, 1..12),
        seed in any::<u64>(),
    ) {
        let to_cat = |c: usize| match c {
            0..=3 => Spatial(SpatialAxis::ALL[c]),
            4..=13 => Visual(VisualFeature::ALL[c - 4]),
            14 => Anonymous,
            _ => Skipped,
        };
        let n = cats.len();
        let mut entries: Vec<(usize, Category)> = cats.iter().map(|&c| to_cat(c)).enumerate().collect();
        let forward = DimensionAssignment::from_entries(entries.clone()).validate(n);
        entries.shuffle(&mut common::rng(seed));
        let shuffled = DimensionAssignment::from_entries(entries).validate(n);
        prop_assert_eq!(&forward, &shuffled);
        if forward.is_ok() {
            let c = DimensionAssignment::dense(cats.iter().map(|&c| to_cat(c))).counts();
            prop_assert_eq!(c.h_s + c.h_v + c.h_a + c.skipped, n);
        }
    }
}

#[test]
fn pca_examples() {
    // Variances 4 and 1, uncorrelated.
    let block = array![[2.0, -2.0, 2.0, -2.0], [1.0, 1.0, -1.0, -1.0]];
    let pca = pca_components(block.view(), 2);
    assert_eq!(pca.loadings.row(0).to_vec(), [1.0, 0.0]);

    let dup = array![[1.0, 4.0, 2.0, 7.0], [1.0, 4.0, 2.0, 7.0]];
    let pca = pca_components(dup.view(), 2);
    let (values, vectors) = common::covariance_oracle(&dup);
    assert_eq!(pca.rank, 1);
    assert!(common::max_abs_diff_up_to_sign(&pca.loadings.row(0).to_vec(), &vectors[0]) < 1e-12);
    assert!(values[1].abs() < 1e-12 && pca.singular_values[1] < 1e-12);
}

#[test]
fn one_hot_example() {
    let ds = dataset(array![[1.0, 2.0, 4.0], [0.5, 0.1, 0.3], [9.0, 9.0, 1.0]]);
    let asgn = DimensionAssignment::dense([Spatial(SpatialAxis::X), Visual(VisualFeature::SkinColor), Skipped]);
    let f = build_filter_matrix(&ds, &asgn).unwrap();
    let mut want = Array2::zeros((K + M, 3));
    want[[0, 0]] = 1.0;
    want[[4, 1]] = 1.0;
    assert_eq!(f.matrix(), &want);
    assert_eq!(f.pca_rows(), 0);
}

#[test]
fn pca_rows_fill_spatial_slots_first() {
    let mut rng = common::rng(21);
    let values = Array2::from_shape_simple_fn((5, 40), || rng.gen_range(-1.0..1.0));
    let ds = dataset(values.clone());
    let asgn =
        DimensionAssignment::dense([Spatial(SpatialAxis::X), Spatial(SpatialAxis::Y), Anonymous, Anonymous, Anonymous]);
    let f = build_filter_matrix(&ds, &asgn).unwrap();

    let slots: Vec<usize> = (0..K + M).filter(|&r| matches!(f.row_kinds()[r], RowKind::PcaComponent(_))).collect();
    assert_eq!(slots, [2, 3, 4]);
    assert_eq!(f.row_kinds().iter().filter(|k| **k == RowKind::Empty).count(), 9);

    let block = values.slice(ndarray::s![2..5, ..]).to_owned();
    let (_, vectors) = common::covariance_oracle(&block);
    for (r, row) in slots.iter().enumerate() {
        let got: Vec<f64> = (2..5).map(|c| f.matrix()[[*row, c]]).collect();
        assert!(common::max_abs_diff_up_to_sign(&got, &vectors[r]) < 1e-9, "component {r}");
        assert_eq!(f.matrix()[[*row, 0]], 0.0);
        assert_eq!(f.matrix()[[*row, 1]], 0.0);
    }
}

#[test]
fn rank_caps_pca_rows() {
    // Four anonymous rows spanning a rank-2 space after centering.
    let base = array![[1.0, 0.0, 2.0, 5.0, 3.0], [0.0, 1.0, 1.0, 0.0, 4.0]];
    let values = ndarray::concatenate![
        ndarray::Axis(0),
        base,
        base.map(|x| x + 3.0),
    ];
    let ds = dataset(values);
    let f = build_filter_matrix(&ds, &DimensionAssignment::dense([Anonymous; 4])).unwrap();
    assert_eq!(f.pca_rows(), 2);
    assert_eq!(f.row_kinds().iter().filter(|k| **k == RowKind::Empty).count(), 12);
}

#[test]
fn standardize_is_idempotent_on_visual_rows() {
    let mut rng = common::rng(22);
    let filtered = Array2::from_shape_simple_fn((K + M, 50), || rng.gen_range(-5.0..5.0));
    let once = standardize(&filtered);
    let mut again_in = filtered.clone();
    again_in.slice_mut(ndarray::s![K.., ..]).assign(&once.visual);
    let twice = standardize(&again_in);
    for (a, b) in once.visual.iter().zip(&twice.visual) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn politicians_visual_rows() {
    let ds = common::politicians(12, 3);
    let asgn = common::assignment(&ds, "politicians-assignment.json");
    let (f, projected) = project(&ds, &asgn).unwrap();

    // Assigned features vary across politicians.
    for feature in [
        VisualFeature::SkinColor,
        VisualFeature::HairColor,
        VisualFeature::NoseLength,
        VisualFeature::Smile,
    ] {
        assert!(!projected.is_degenerate(K + feature.index()), "{feature} should vary");
    }
    // The three anonymous dimensions fill T and the first two free visual
    // slots; the remaining visual rows stay empty.
    let pca: Vec<usize> = (0..K + M).filter(|&r| matches!(f.row_kinds()[r], RowKind::PcaComponent(_))).collect();
    assert_eq!(pca, [3, K + VisualFeature::EyeSpacing.index(), K + VisualFeature::MouthWidth.index()]);
    for feature in [
        VisualFeature::Frown,
        VisualFeature::HairLength,
        VisualFeature::FaceElongation,
        VisualFeature::IrisColor,
    ] {
        let r = K + feature.index();
        assert!(projected.is_degenerate(r));
        assert!(projected.visual.row(feature.index()).iter().all(|&v| v == 0.0));
    }
}
