#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::Array2;
use ndswarm::assignment::AssignmentSpec;
use ndswarm::dataset::{self, Archetype, SyntheticSpec};
use ndswarm::scene::GlyphMesh;
use ndswarm::{Dataset, DimensionAssignment, LoadOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures").join(name)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn wine() -> Dataset {
    dataset::load_csv(data_path("winequality-red.csv"), &LoadOptions::default()).unwrap()
}

pub fn assignment_spec(file: &str) -> AssignmentSpec {
    let text = std::fs::read_to_string(data_path(file)).unwrap();
    serde_json::from_str(&text).unwrap()
}

pub fn assignment(ds: &Dataset, file: &str) -> DimensionAssignment {
    DimensionAssignment::from_spec(&assignment_spec(file), ds.names()).unwrap()
}

pub fn politicians(n_points: usize, seed: u64) -> Dataset {
    dataset::generate_synthetic(&SyntheticSpec {
        archetype: Archetype::Politicians,
        n_points,
        seed,
    })
    .unwrap()
}

/// Corrected two-pass mean and population standard deviation (exact for
/// constant input).
pub fn two_pass_moments(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let naive = xs.iter().sum::<f64>() / n;
    let mean = naive + xs.iter().map(|x| x - naive).sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Eigen-decomposition of the scatter matrix `Bc · Bcᵀ` of the row-centered
/// block: eigenvalues (descending) and matching unit eigenvectors.
pub fn covariance_oracle(block: &Array2<f64>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let (h, n) = block.dim();
    let mut centered = DMatrix::<f64>::zeros(h, n);
    for i in 0..h {
        let row: Vec<f64> = block.row(i).to_vec();
        let (mean, _) = two_pass_moments(&row);
        for j in 0..n {
            centered[(i, j)] = row[j] - mean;
        }
    }
    let scatter = &centered * centered.transpose();
    let eig = SymmetricEigen::new(scatter);
    let mut order: Vec<usize> = (0..h).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| eig.eigenvectors.column(k).iter().copied().collect())
        .collect();
    (values, vectors)
}

/// Largest `|a − s·b|` over the sign `s` that best aligns `b` with `a`.
pub fn max_abs_diff_up_to_sign(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let s = if dot < 0.0 { -1.0 } else { 1.0 };
    a.iter().zip(b).map(|(x, y)| (x - s * y).abs()).fold(0.0, f64::max)
}

/// Every directed edge occurs once and its reverse occurs once, i.e. each
/// connected surface is closed and consistently oriented.
pub fn watertight(mesh: &GlyphMesh) -> Result<(), String> {
    let mut edges: HashMap<(u32, u32), usize> = HashMap::new();
    for t in &mesh.triangles {
        if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
            return Err(format!("degenerate triangle {t:?}"));
        }
        for k in 0..3 {
            let e = (t[k], t[(k + 1) % 3]);
            if e.0 as usize >= mesh.vertices.len() || e.1 as usize >= mesh.vertices.len() {
                return Err(format!("index out of range in {t:?}"));
            }
            *edges.entry(e).or_default() += 1;
        }
    }
    for (&(a, b), &count) in &edges {
        if count != 1 {
            return Err(format!("edge {a}->{b} used {count} times"));
        }
        if edges.get(&(b, a)) != Some(&1) {
            return Err(format!("edge {a}->{b} has no twin"));
        }
    }
    Ok(())
}
