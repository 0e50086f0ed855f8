//! Tabular datasets in the `n × N` layout used by the rest of the pipeline.
//!
//! File columns become matrix rows (dimensions) and file rows become matrix
//! columns (points).

use std::collections::HashSet;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use ndarray::{Array2, ArrayView1, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing header row")]
    MissingHeader,
    #[error("row {row} has {found} cells, expected {expected}")]
    Ragged {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("duplicate dimension name {0:?}")]
    DuplicateName(String),
    #[error("empty dimension name at column {0}")]
    EmptyName(usize),
    #[error("label column {0:?} not found in header")]
    UnknownLabelColumn(String),
    #[error("non-numeric cell {value:?} in column {column:?} (row {row})")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },
    #[error("missing value in column {column:?} (row {row})")]
    Missing { row: usize, column: String },
    #[error("dataset has no numeric dimensions")]
    NoDimensions,
    #[error("dataset has no points")]
    NoPoints,
    #[error("non-finite value at dimension {dim}, point {point}")]
    NonFinite { dim: usize, point: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("unknown archetype {0:?} (expected \"politicians\" or \"drinks\")")]
    UnknownArchetype(String),
    #[error("archetype {archetype} needs at least {min} points, got {requested}")]
    TooFewPoints {
        archetype: Archetype,
        min: usize,
        requested: usize,
    },
}

/// An immutable `n × N` numeric matrix with named dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    names: Vec<String>,
    values: Array2<f64>,
    labels: Option<Vec<String>>,
    source: String,
}

impl Dataset {
    pub fn new(
        names: Vec<String>,
        values: Array2<f64>,
        labels: Option<Vec<String>>,
        source: impl Into<String>,
    ) -> Result<Self, DatasetError> {
        let (n, count) = values.dim();
        if n == 0 || names.is_empty() {
            return Err(DatasetError::NoDimensions);
        }
        if names.len() != n {
            return Err(DatasetError::Shape(format!(
                "{} names for {} dimensions",
                names.len(),
                n
            )));
        }
        if count == 0 {
            return Err(DatasetError::NoPoints);
        }
        let mut seen = HashSet::with_capacity(n);
        for (i, name) in names.iter().enumerate() {
            if name.trim().is_empty() {
                return Err(DatasetError::EmptyName(i));
            }
            if !seen.insert(name.as_str()) {
                return Err(DatasetError::DuplicateName(name.clone()));
            }
        }
        if let Some(labels) = &labels {
            if labels.len() != count {
                return Err(DatasetError::Shape(format!(
                    "{} labels for {} points",
                    labels.len(),
                    count
                )));
            }
        }
        if let Some(((dim, point), _)) = values.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(DatasetError::NonFinite { dim, point });
        }
        Ok(Self {
            names,
            values,
            labels,
            source: source.into(),
        })
    }

    /// Number of dimensions `n`.
    pub fn dims(&self) -> usize {
        self.values.nrows()
    }

    /// Number of points `N`.
    pub fn len(&self) -> usize {
        self.values.ncols()
    }

    /// Always false: a valid dataset holds at least one point.
    pub fn is_empty(&self) -> bool {
        self.values.ncols() == 0
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn row(&self, dim: usize) -> ArrayView1<'_, f64> {
        self.values.row(dim)
    }

    /// Returns a copy with points reordered by `order` (a permutation of `0..N`).
    pub fn permute_points(&self, order: &[usize]) -> Result<Self, DatasetError> {
        if order.len() != self.len() {
            return Err(DatasetError::Shape("permutation length".into()));
        }
        let values = self.values.select(Axis(1), order);
        let labels = self
            .labels
            .as_ref()
            .map(|l| order.iter().map(|&i| l[i].clone()).collect());
        Self::new(self.names.clone(), values, labels, self.source.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MissingPolicy {
    /// Points with a missing numeric cell are dropped.
    #[default]
    DropPoint,
    /// Any missing numeric cell fails the load.
    Strict,
}

impl FromStr for MissingPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "drop-point" => Ok(Self::DropPoint),
            "strict" => Ok(Self::Strict),
            other => Err(format!("unknown missing policy {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct LoadOptions {
    pub delimiter: u8,
    pub label_column: Option<String>,
    pub missing_policy: MissingPolicy,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            delimiter: b',',
            label_column: None,
            missing_policy: MissingPolicy::DropPoint,
        }
    }
}

impl LoadOptions {
    pub fn with_label_column(mut self, column: impl Into<String>) -> Self {
        self.label_column = Some(column.into());
        self
    }
}

enum Cell {
    Value(f64),
    Missing,
}

// Blank cells and NA-style tokens count as missing; so do literal NaN/Inf,
// which must never reach the matrix.
fn parse_cell(raw: &str) -> Option<Cell> {
    let s = raw.trim();
    if s.is_empty() {
        return Some(Cell::Missing);
    }
    if matches!(s, "NA" | "N/A" | "na" | "n/a" | "null" | "NULL" | "?") {
        return Some(Cell::Missing);
    }
    let v: f64 = s.parse().ok()?;
    if v.is_finite() {
        Some(Cell::Value(v))
    } else {
        Some(Cell::Missing)
    }
}

pub fn load_csv(path: impl AsRef<Path>, options: &LoadOptions) -> Result<Dataset, DatasetError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_csv(file, options, path.display().to_string())
}

/// Parses CSV from any reader; `source` is recorded as provenance.
pub fn read_csv<R: Read>(
    reader: R,
    options: &LoadOptions,
    source: impl Into<String>,
) -> Result<Dataset, DatasetError> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].trim().is_empty()) {
        return Err(DatasetError::MissingHeader);
    }
    let columns: Vec<String> = header.iter().map(|h| h.trim().to_string()).collect();
    let mut seen = HashSet::new();
    for (i, name) in columns.iter().enumerate() {
        if name.is_empty() {
            return Err(DatasetError::EmptyName(i));
        }
        if !seen.insert(name.as_str()) {
            return Err(DatasetError::DuplicateName(name.clone()));
        }
    }
    let label_idx = match &options.label_column {
        Some(label) => Some(
            columns
                .iter()
                .position(|c| c == label)
                .ok_or_else(|| DatasetError::UnknownLabelColumn(label.clone()))?,
        ),
        None => None,
    };
    let numeric: Vec<usize> = (0..columns.len()).filter(|&c| Some(c) != label_idx).collect();
    if numeric.is_empty() {
        return Err(DatasetError::NoDimensions);
    }

    let mut data: Vec<Vec<f64>> = vec![Vec::new(); numeric.len()];
    let mut labels = Vec::new();
    for (row_idx, record) in rdr.records().enumerate() {
        let record = record?;
        // 1-based file line of this record, counting the header.
        let row = row_idx + 2;
        if record.len() != columns.len() {
            return Err(DatasetError::Ragged {
                row,
                found: record.len(),
                expected: columns.len(),
            });
        }
        let mut point = Vec::with_capacity(numeric.len());
        let mut missing = false;
        for &c in &numeric {
            match parse_cell(&record[c]) {
                Some(Cell::Value(v)) => point.push(v),
                Some(Cell::Missing) => match options.missing_policy {
                    MissingPolicy::Strict => {
                        return Err(DatasetError::Missing {
                            row,
                            column: columns[c].clone(),
                        })
                    }
                    MissingPolicy::DropPoint => missing = true,
                },
                None => {
                    return Err(DatasetError::NonNumeric {
                        row,
                        column: columns[c].clone(),
                        value: record[c].to_string(),
                    })
                }
            }
        }
        if missing {
            continue;
        }
        for (dst, v) in data.iter_mut().zip(point) {
            dst.push(v);
        }
        if let Some(l) = label_idx {
            labels.push(record[l].to_string());
        }
    }

    let count = data[0].len();
    if count == 0 {
        return Err(DatasetError::NoPoints);
    }
    let flat: Vec<f64> = data.into_iter().flatten().collect();
    let values = Array2::from_shape_vec((numeric.len(), count), flat)
        .map_err(|e| DatasetError::Shape(e.to_string()))?;
    let names = numeric.iter().map(|&c| columns[c].clone()).collect();
    Dataset::new(names, values, label_idx.map(|_| labels), source)
}

/// Writes `ds` as CSV with points as rows. Floats use the shortest
/// representation that parses back to the same value.
pub fn write_csv<W: Write>(ds: &Dataset, writer: W, label_header: &str) -> Result<(), DatasetError> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = ds.names.iter().map(String::as_str).collect();
    if ds.labels.is_some() {
        header.push(label_header);
    }
    wtr.write_record(&header)?;
    for p in 0..ds.len() {
        let mut rec: Vec<String> = ds.values.column(p).iter().map(|v| format!("{v}")).collect();
        if let Some(labels) = &ds.labels {
            rec.push(labels[p].clone());
        }
        wtr.write_record(&rec)?;
    }
    wtr.flush().map_err(|source| DatasetError::Io {
        path: "<writer>".into(),
        source,
    })?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionSummary {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub std_dev: f64,
    pub distinct: usize,
}

pub fn summarize(ds: &Dataset) -> Vec<DimensionSummary> {
    ds.names
        .iter()
        .zip(ds.values.rows())
        .map(|(name, row)| summarize_row(name, row))
        .collect()
}

// Statistics are computed on the sorted row so the result does not depend on
// point order, down to the last bit.
fn summarize_row(name: &str, row: ArrayView1<'_, f64>) -> DimensionSummary {
    let mut sorted: Vec<f64> = row.iter().map(|&v| if v == 0.0 { 0.0 } else { v }).collect();
    sorted.sort_by(f64::total_cmp);
    let min = sorted[0];
    let max = sorted[sorted.len() - 1];

    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (x - mean);
    }
    let std_dev = if min == max {
        0.0
    } else {
        (m2 / sorted.len() as f64).max(0.0).sqrt()
    };
    let mut distinct = sorted.clone();
    distinct.dedup();

    DimensionSummary {
        name: name.to_string(),
        min,
        max,
        mean: mean.clamp(min, max),
        std_dev,
        distinct: distinct.len(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Archetype {
    Politicians,
    Drinks,
}

impl Archetype {
    pub fn groups(self) -> &'static [&'static str] {
        match self {
            Self::Politicians => &["populists", "conservatives", "liberals", "technocrats"],
            Self::Drinks => &["classic", "premium", "extreme"],
        }
    }
}

impl fmt::Display for Archetype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Politicians => "politicians",
            Self::Drinks => "drinks",
        })
    }
}

impl FromStr for Archetype {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "politicians" => Ok(Self::Politicians),
            "drinks" => Ok(Self::Drinks),
            other => Err(DatasetError::UnknownArchetype(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub archetype: Archetype,
    pub n_points: usize,
    pub seed: u64,
}

/// Name of the categorical group column in synthetic datasets.
pub const GROUP_COLUMN: &str = "group_numeric";

struct FeatureModel {
    name: &'static str,
    range: (f64, f64),
    /// Per-group mean, one entry per archetype group.
    means: &'static [f64],
    spread: f64,
}

const POLITICIAN_FEATURES: &[FeatureModel] = &[
    FeatureModel { name: "promises", range: (0.0, 100.0), means: &[85.0, 35.0, 55.0, 20.0], spread: 8.0 },
    FeatureModel { name: "fulfillment", range: (0.0, 1.0), means: &[0.2, 0.6, 0.5, 0.85], spread: 0.08 },
    FeatureModel { name: "sympathy", range: (0.0, 10.0), means: &[7.5, 5.0, 6.0, 4.0], spread: 1.0 },
    FeatureModel { name: "popularity", range: (0.0, 100.0), means: &[70.0, 50.0, 55.0, 30.0], spread: 10.0 },
    FeatureModel { name: "economic_views", range: (-5.0, 5.0), means: &[-1.0, 3.5, 1.5, 0.5], spread: 0.8 },
    FeatureModel { name: "social_views", range: (-5.0, 5.0), means: &[-2.0, -3.5, 3.5, 1.0], spread: 0.8 },
    FeatureModel { name: "media_activity", range: (0.0, 10.0), means: &[9.0, 4.0, 6.5, 2.5], spread: 0.9 },
    FeatureModel { name: "voting_effectiveness", range: (0.0, 1.0), means: &[0.3, 0.7, 0.55, 0.8], spread: 0.07 },
    FeatureModel { name: "age", range: (25.0, 85.0), means: &[45.0, 62.0, 41.0, 52.0], spread: 7.0 },
];

const DRINK_FEATURES: &[FeatureModel] = &[
    FeatureModel { name: "sweetness", range: (0.0, 10.0), means: &[6.5, 4.5, 8.5], spread: 0.9 },
    FeatureModel { name: "fizziness", range: (0.0, 10.0), means: &[6.0, 4.0, 8.5], spread: 1.0 },
    FeatureModel { name: "overall_rating", range: (1.0, 5.0), means: &[3.6, 4.3, 3.0], spread: 0.4 },
    FeatureModel { name: "color_intensity", range: (0.0, 10.0), means: &[6.0, 3.0, 8.5], spread: 1.0 },
    FeatureModel { name: "price", range: (0.5, 12.0), means: &[1.8, 5.5, 2.8], spread: 0.6 },
    FeatureModel { name: "caffeine", range: (0.0, 300.0), means: &[30.0, 10.0, 160.0], spread: 18.0 },
    FeatureModel { name: "sourness", range: (0.0, 10.0), means: &[3.0, 4.5, 6.5], spread: 0.8 },
    FeatureModel { name: "sugar", range: (0.0, 80.0), means: &[38.0, 22.0, 55.0], spread: 5.0 },
    FeatureModel { name: "citric_acid", range: (0.0, 8.0), means: &[2.0, 3.5, 5.0], spread: 0.5 },
    FeatureModel { name: "co2_pressure", range: (1.0, 6.0), means: &[3.5, 2.5, 4.8], spread: 0.35 },
    FeatureModel { name: "preservatives", range: (0.0, 1.0), means: &[0.45, 0.15, 0.7], spread: 0.08 },
];

const FIRST_NAMES: &[&str] = &[
    "Ada", "Boris", "Celina", "Dorian", "Elena", "Feliks", "Greta", "Hugo", "Irena", "Jonas",
    "Klara", "Leon", "Marta", "Nikodem", "Olga", "Piotr", "Renata", "Stefan", "Tamara", "Wiktor",
];
const LAST_NAMES: &[&str] = &[
    "Arden", "Brandt", "Corvin", "Dale", "Ember", "Frost", "Garnet", "Holt", "Ivers", "Jarek",
    "Kestrel", "Lorne", "Moravec", "Novak", "Orlov", "Pike", "Quill", "Rusk", "Sable", "Tarn",
];
const DRINK_PREFIXES: &[&str] = &[
    "Fizz", "Bolt", "Crisp", "Dew", "Echo", "Flare", "Glow", "Haze", "Jolt", "Kick", "Lush", "Mint",
];

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Dataset, DatasetError> {
    let groups = spec.archetype.groups();
    if spec.n_points < groups.len() {
        return Err(DatasetError::TooFewPoints {
            archetype: spec.archetype,
            min: groups.len(),
            requested: spec.n_points,
        });
    }
    let features = match spec.archetype {
        Archetype::Politicians => POLITICIAN_FEATURES,
        Archetype::Drinks => DRINK_FEATURES,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = features.len() + 1;
    let mut values = Array2::zeros((n, spec.n_points));
    let mut labels = Vec::with_capacity(spec.n_points);
    for p in 0..spec.n_points {
        // Round-robin keeps every group represented once N >= #groups.
        let g = p % groups.len();
        for (d, feat) in features.iter().enumerate() {
            let noise = Normal::new(0.0, feat.spread).expect("positive spread");
            let raw = feat.means[g] + noise.sample(&mut rng);
            let v = raw.clamp(feat.range.0, feat.range.1);
            values[[d, p]] = (v * 1000.0).round() / 1000.0;
        }
        values[[n - 1, p]] = g as f64;
        let label = match spec.archetype {
            Archetype::Politicians => format!(
                "{} {}",
                FIRST_NAMES[rng.gen_range(0..FIRST_NAMES.len())],
                LAST_NAMES[rng.gen_range(0..LAST_NAMES.len())]
            ),
            Archetype::Drinks => format!(
                "{} {} {:03}",
                DRINK_PREFIXES[rng.gen_range(0..DRINK_PREFIXES.len())],
                groups[g],
                p + 1
            ),
        };
        labels.push(label);
    }
    let mut names: Vec<String> = features.iter().map(|f| f.name.to_string()).collect();
    names.push(GROUP_COLUMN.to_string());
    Dataset::new(
        names,
        values,
        Some(labels),
        format!("synthetic:{}:n={}:seed={}", spec.archetype, spec.n_points, spec.seed),
    )
}
