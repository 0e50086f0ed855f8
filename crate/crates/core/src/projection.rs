//! Filtering matrix construction, PCA over anonymous dimensions, and
//! row standardization into spatial and visual parts.

use std::fmt;

use ndarray::{s, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assignment::{Category, DimensionAssignment, SpatialAxis, Violation, VisualFeature};
use crate::dataset::Dataset;
use crate::{K, M};

/// Rows with population standard deviation below this are treated as constant.
pub const DEGENERATE_STD: f64 = 1e-12;

/// Offset added to standardized spatial rows.
pub const SPATIAL_SHIFT: f64 = 0.5;

const MAX_JACOBI_SWEEPS: usize = 80;

#[derive(Debug, Error, PartialEq)]
pub enum ProjectionError {
    #[error("invalid assignment: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidAssignment(Vec<Violation>),
    #[error("nothing to project: every dimension is skipped")]
    NothingMapped,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("no dimensions selected for PCA")]
    NoPcaDimensions,
}

/// Principal directions of a row-centered block.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaComponents {
    /// One unit-norm loading per row, strongest first.
    pub loadings: Array2<f64>,
    /// Full singular spectrum of the centered block, non-increasing.
    pub singular_values: Vec<f64>,
    /// Numeric rank of the centered block.
    pub rank: usize,
}

/// Principal components of `block` (rows are variables, columns are points).
///
/// Rows are centered first. Returns at most `c` components, and never more
/// than the numeric rank of the centered block. Each loading is sign-fixed so
/// its largest-magnitude entry is non-negative.
pub fn pca_components(block: ArrayView2<'_, f64>, c: usize) -> PcaComponents {
    let h = block.nrows();
    let n = block.ncols();
    let mut cols: Vec<Vec<f64>> = block
        .rows()
        .into_iter()
        .map(|row| {
            let mean = row.sum() / n.max(1) as f64;
            row.iter().map(|v| v - mean).collect()
        })
        .collect();
    let (sigma, basis) = one_sided_jacobi(&mut cols);

    let mut order: Vec<usize> = (0..h).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]).then(a.cmp(&b)));
    let singular_values: Vec<f64> = order.iter().map(|&j| sigma[j]).collect();

    // Centering leaves rounding residue proportional to the raw magnitudes,
    // so the tolerance is floored by the uncentered block norm as well.
    let smax = singular_values.first().copied().unwrap_or(0.0);
    let raw_norm = block.iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = smax.max(raw_norm) * (h.max(n) as f64) * f64::EPSILON;
    let rank = if smax > 0.0 {
        singular_values.iter().take_while(|&&s| s > tol).count()
    } else {
        0
    };

    let take = c.min(rank);
    let mut loadings = Array2::zeros((take, h));
    for (r, &j) in order.iter().take(take).enumerate() {
        let mut v: Vec<f64> = (0..h).map(|i| basis[i][j]).collect();
        fix_sign(&mut v);
        for (i, x) in v.into_iter().enumerate() {
            loadings[[r, i]] = x;
        }
    }
    PcaComponents {
        loadings,
        singular_values,
        rank,
    }
}

fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|x| *x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Hestenes one-sided Jacobi on the columns `cols` (each of length N).
///
/// On return the columns are mutually orthogonal; returns their norms (the
/// singular values) and the accumulated `h × h` rotation, whose columns are
/// the corresponding right singular vectors of `[cols]`.
fn one_sided_jacobi(cols: &mut [Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let h = cols.len();
    let mut v: Vec<Vec<f64>> = (0..h)
        .map(|i| (0..h).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..h {
            for q in p + 1..h {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                let (lo, hi) = cols.split_at_mut(q);
                for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let (a, b) = (*x, *y);
                    *x = cs * a - sn * b;
                    *y = sn * a + cs * b;
                }
                for row in v.iter_mut() {
                    let (a, b) = (row[p], row[q]);
                    row[p] = cs * a - sn * b;
                    row[q] = sn * a + cs * b;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let sigma = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    (sigma, v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "target", rename_all = "snake_case")]
pub enum RowKind {
    Spatial(SpatialAxis),
    Visual(VisualFeature),
    /// Principal component of the anonymous block; 0 is the strongest.
    PcaComponent(usize),
    Empty,
}

impl fmt::Display for RowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Spatial(a) => write!(f, "spatial {a}"),
            Self::Visual(v) => write!(f, "visual {v}"),
            Self::PcaComponent(r) => write!(f, "PC{}", r + 1),
            Self::Empty => f.write_str("empty"),
        }
    }
}

/// Output slot name for row `r` of the filtering matrix.
pub fn slot_name(r: usize) -> &'static str {
    if r < K {
        SpatialAxis::ALL[r].name()
    } else {
        VisualFeature::ALL[r - K].name()
    }
}

/// The `(K + M) × n` filtering matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterMatrix {
    matrix: Array2<f64>,
    row_kinds: Vec<RowKind>,
    pca_loadings: Vec<Vec<(usize, f64)>>,
    singular_values: Vec<f64>,
}

impl FilterMatrix {
    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn row_kinds(&self) -> &[RowKind] {
        &self.row_kinds
    }

    /// `(dimension, coefficient)` pairs for PCA component `rank`.
    pub fn pca_loadings(&self, rank: usize) -> Option<&[(usize, f64)]> {
        self.pca_loadings.get(rank).map(Vec::as_slice)
    }

    pub fn pca_rows(&self) -> usize {
        self.pca_loadings.len()
    }

    /// Singular spectrum of the centered anonymous block (empty without PCA).
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn input_dims(&self) -> usize {
        self.matrix.ncols()
    }
}

pub fn build_filter_matrix(
    ds: &Dataset,
    asgn: &DimensionAssignment,
) -> Result<FilterMatrix, ProjectionError> {
    let n = ds.dims();
    asgn.validate(n).map_err(ProjectionError::InvalidAssignment)?;
    let counts = asgn.counts();
    if counts.h_s + counts.h_v == 0 && counts.h_a == 0 {
        return Err(ProjectionError::NothingMapped);
    }

    let mut matrix = Array2::zeros((K + M, n));
    let mut row_kinds = vec![RowKind::Empty; K + M];
    for (dim, cat) in asgn.categories(n).into_iter().enumerate() {
        match cat {
            Category::Spatial(a) => {
                matrix[[a.index(), dim]] = 1.0;
                row_kinds[a.index()] = RowKind::Spatial(a);
            }
            Category::Visual(f) => {
                matrix[[K + f.index(), dim]] = 1.0;
                row_kinds[K + f.index()] = RowKind::Visual(f);
            }
            Category::Anonymous | Category::Skipped => {}
        }
    }

    let empty: Vec<usize> = (0..K + M).filter(|&r| row_kinds[r] == RowKind::Empty).collect();
    let anonymous = asgn.anonymous_dims();
    let mut pca_loadings = Vec::new();
    let mut singular_values = Vec::new();
    if !anonymous.is_empty() && !empty.is_empty() {
        let block = ds.values().select(Axis(0), &anonymous);
        let pca = pca_components(block.view(), empty.len());
        for (r, loading) in pca.loadings.rows().into_iter().enumerate() {
            let row = empty[r];
            row_kinds[row] = RowKind::PcaComponent(r);
            let pairs: Vec<(usize, f64)> =
                anonymous.iter().copied().zip(loading.iter().copied()).collect();
            for &(dim, coeff) in &pairs {
                matrix[[row, dim]] = coeff;
            }
            pca_loadings.push(pairs);
        }
        singular_values = pca.singular_values;
    }

    Ok(FilterMatrix {
        matrix,
        row_kinds,
        pca_loadings,
        singular_values,
    })
}

/// `F · X`.
pub fn apply_filter(f: &FilterMatrix, ds: &Dataset) -> Result<Array2<f64>, ProjectionError> {
    if f.input_dims() != ds.dims() {
        return Err(ProjectionError::DimensionMismatch {
            expected: f.input_dims(),
            found: ds.dims(),
        });
    }
    Ok(f.matrix.dot(ds.values()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RowStats {
    pub mean: f64,
    /// Population standard deviation before scaling (0 for degenerate rows).
    pub scale: f64,
}

/// Standardized filter output split into spatial (`K × N`) and visual (`M × N`) parts.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedData {
    pub spatial: Array2<f64>,
    pub visual: Array2<f64>,
    pub row_stats: Vec<RowStats>,
    pub degenerate_rows: Vec<usize>,
}

impl ProjectedData {
    pub fn len(&self) -> usize {
        self.spatial.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.spatial.ncols() == 0
    }

    pub fn is_degenerate(&self, row: usize) -> bool {
        self.degenerate_rows.binary_search(&row).is_ok()
    }
}

/// Population mean and standard deviation; exactly zero spread for constant rows.
pub(crate) fn row_moments(row: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let mut count = 0usize;
    let mut sum = 0.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for x in row.clone() {
        count += 1;
        sum += x;
        lo = lo.min(x);
        hi = hi.max(x);
    }
    if count == 0 {
        return (0.0, 0.0);
    }
    let mean = sum / count as f64;
    if lo == hi {
        return (lo, 0.0);
    }
    let var = row.map(|x| (x - mean) * (x - mean)).sum::<f64>() / count as f64;
    (mean, var.sqrt())
}

/// Centers and scales every row of `filtered` (`(K + M) × N`); spatial rows
/// are then shifted by [`SPATIAL_SHIFT`].
pub fn standardize(filtered: &Array2<f64>) -> ProjectedData {
    assert_eq!(filtered.nrows(), K + M, "filter output must have K + M rows");
    let mut out = filtered.clone();
    let mut row_stats = Vec::with_capacity(K + M);
    let mut degenerate_rows = Vec::new();
    for (r, mut row) in out.rows_mut().into_iter().enumerate() {
        let (mean, std) = row_moments(row.iter().copied());
        let shift = if r < K { SPATIAL_SHIFT } else { 0.0 };
        if std < DEGENERATE_STD {
            degenerate_rows.push(r);
            row.fill(shift);
        } else {
            row.mapv_inplace(|x| (x - mean) / std + shift);
        }
        row_stats.push(RowStats { mean, scale: std });
    }
    ProjectedData {
        spatial: out.slice(s![..K, ..]).to_owned(),
        visual: out.slice(s![K.., ..]).to_owned(),
        row_stats,
        degenerate_rows,
    }
}

/// Runs filter construction, `F · X` and standardization.
pub fn project(
    ds: &Dataset,
    asgn: &DimensionAssignment,
) -> Result<(FilterMatrix, ProjectedData), ProjectionError> {
    let f = build_filter_matrix(ds, asgn)?;
    let filtered = apply_filter(&f, ds)?;
    Ok((f, standardize(&filtered)))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PcaScope {
    /// Only dimensions marked anonymous.
    #[default]
    Anonymous,
    /// Anonymous dimensions plus those mapped to spatial axes.
    AnonymousAndSpatial,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PcaScaling {
    /// Each dimension is z-scored first (correlation PCA).
    #[default]
    Standardized,
    /// Dimensions are only centered (covariance PCA, as used to fill the filter).
    Centered,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PcaReportOptions {
    pub scope: PcaScope,
    pub scaling: PcaScaling,
}

/// Loadings and explained variance of a PCA over selected dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaReport {
    pub scope: PcaScope,
    pub scaling: PcaScaling,
    pub dims: Vec<usize>,
    pub names: Vec<String>,
    /// One row per component, one column per entry of `names`.
    pub loadings: Vec<Vec<f64>>,
    pub explained_variance: Vec<f64>,
    pub singular_values: Vec<f64>,
}

impl PcaReport {
    /// Loading of dimension `name` in component `component`.
    pub fn loading(&self, component: usize, name: &str) -> Option<f64> {
        let col = self.names.iter().position(|n| n == name)?;
        self.loadings.get(component).map(|row| row[col])
    }
}

pub fn pca_report(
    ds: &Dataset,
    asgn: &DimensionAssignment,
    options: PcaReportOptions,
) -> Result<PcaReport, ProjectionError> {
    asgn.validate(ds.dims()).map_err(ProjectionError::InvalidAssignment)?;
    let mut dims = asgn.anonymous_dims();
    if options.scope == PcaScope::AnonymousAndSpatial {
        dims.extend(asgn.spatial_dims());
        dims.sort_unstable();
    }
    if dims.is_empty() {
        return Err(ProjectionError::NoPcaDimensions);
    }
    let mut block = ds.values().select(Axis(0), &dims);
    if options.scaling == PcaScaling::Standardized {
        for mut row in block.rows_mut() {
            let (mean, std) = row_moments(row.iter().copied());
            if std < DEGENERATE_STD {
                row.fill(0.0);
            } else {
                row.mapv_inplace(|x| (x - mean) / std);
            }
        }
    }
    let pca = pca_components(block.view(), dims.len());
    let total: f64 = pca.singular_values.iter().map(|s| s * s).sum();
    let explained_variance = pca
        .singular_values
        .iter()
        .take(pca.rank)
        .map(|s| if total > 0.0 { s * s / total } else { 0.0 })
        .collect();
    Ok(PcaReport {
        scope: options.scope,
        scaling: options.scaling,
        names: dims.iter().map(|&d| ds.names()[d].clone()).collect(),
        dims,
        loadings: pca.loadings.rows().into_iter().map(|r| r.to_vec()).collect(),
        explained_variance,
        singular_values: pca.singular_values[..pca.rank].to_vec(),
    })
}
