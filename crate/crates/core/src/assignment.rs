//! Semantic division of input dimensions into spatial axes, avatar features,
//! anonymous (PCA-fed) dimensions and skipped dimensions.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{K, M};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SpatialAxis {
    X,
    Y,
    Z,
    T,
}

impl SpatialAxis {
    pub const ALL: [SpatialAxis; K] = [Self::X, Self::Y, Self::Z, Self::T];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::X => "X",
            Self::Y => "Y",
            Self::Z => "Z",
            Self::T => "T",
        }
    }
}

impl fmt::Display for SpatialAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SpatialAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown spatial axis {s:?}"))
    }
}

/// Avatar facial attributes, in catalog order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VisualFeature {
    /// Skin color.
    #[serde(rename = "Skin_C")]
    SkinColor,
    /// Hair color.
    #[serde(rename = "Hair_C")]
    HairColor,
    /// Distance between the eyes.
    #[serde(rename = "Eye_S")]
    EyeSpacing,
    #[serde(rename = "Nose_L")]
    NoseLength,
    #[serde(rename = "Mouth_W")]
    MouthWidth,
    /// Upward curvature of the mouth.
    #[serde(rename = "Smile")]
    Smile,
    #[serde(rename = "Frown")]
    Frown,
    #[serde(rename = "Hair_L")]
    HairLength,
    /// Face proportions (vertical elongation).
    #[serde(rename = "Face_Elong")]
    FaceElongation,
    #[serde(rename = "Iris_C")]
    IrisColor,
}

impl VisualFeature {
    pub const ALL: [VisualFeature; M] = [
        Self::SkinColor,
        Self::HairColor,
        Self::EyeSpacing,
        Self::NoseLength,
        Self::MouthWidth,
        Self::Smile,
        Self::Frown,
        Self::HairLength,
        Self::FaceElongation,
        Self::IrisColor,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::SkinColor => "Skin_C",
            Self::HairColor => "Hair_C",
            Self::EyeSpacing => "Eye_S",
            Self::NoseLength => "Nose_L",
            Self::MouthWidth => "Mouth_W",
            Self::Smile => "Smile",
            Self::Frown => "Frown",
            Self::HairLength => "Hair_L",
            Self::FaceElongation => "Face_Elong",
            Self::IrisColor => "Iris_C",
        }
    }
}

impl fmt::Display for VisualFeature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VisualFeature {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown visual feature {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Category {
    Spatial(SpatialAxis),
    Visual(VisualFeature),
    Anonymous,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    DimensionOutOfRange { dim: usize, n: usize },
    DimensionDeclaredTwice { dim: usize },
    DimensionsNotCovered { dims: Vec<usize> },
    AxisAssignedTwice { axis: SpatialAxis, dims: Vec<usize> },
    FeatureAssignedTwice { feature: VisualFeature, dims: Vec<usize> },
}

fn join(dims: &[usize]) -> String {
    dims.iter().map(usize::to_string).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DimensionOutOfRange { dim, n } => {
                write!(f, "dimension {dim} out of range (n = {n})")
            }
            Self::DimensionDeclaredTwice { dim } => write!(f, "dimension {dim} declared twice"),
            Self::DimensionsNotCovered { dims } => {
                write!(f, "dimensions not covered: {}", join(dims))
            }
            Self::AxisAssignedTwice { axis, dims } => {
                write!(f, "axis {axis} assigned twice (dimensions {})", join(dims))
            }
            Self::FeatureAssignedTwice { feature, dims } => {
                write!(f, "feature {feature} assigned twice (dimensions {})", join(dims))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub h_s: usize,
    pub h_v: usize,
    pub h_a: usize,
    pub skipped: usize,
}

/// Per-dimension category declarations.
///
/// Entries are kept as declared; [`DimensionAssignment::validate`] checks
/// coverage and uniqueness independently of declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionAssignment {
    entries: Vec<(usize, Category)>,
}

impl DimensionAssignment {
    pub fn from_entries(entries: impl IntoIterator<Item = (usize, Category)>) -> Self {
        Self {
            entries: entries.into_iter().collect(),
        }
    }

    /// One category per dimension, in dimension order.
    pub fn dense(categories: impl IntoIterator<Item = Category>) -> Self {
        Self::from_entries(categories.into_iter().enumerate())
    }

    pub fn all_skipped(n: usize) -> Self {
        Self::dense(std::iter::repeat_n(Category::Skipped, n))
    }

    pub fn entries(&self) -> &[(usize, Category)] {
        &self.entries
    }

    /// Category of `dim`; undeclared dimensions read as skipped.
    pub fn category(&self, dim: usize) -> Category {
        self.entries
            .iter()
            .find(|(d, _)| *d == dim)
            .map(|(_, c)| *c)
            .unwrap_or(Category::Skipped)
    }

    /// Categories indexed by dimension, for `n` dimensions.
    pub fn categories(&self, n: usize) -> Vec<Category> {
        let mut out = vec![Category::Skipped; n];
        // Walk in reverse so the first declaration wins, matching `category`.
        for &(d, c) in self.entries.iter().rev() {
            if d < n {
                out[d] = c;
            }
        }
        out
    }

    pub fn validate(&self, n: usize) -> Result<(), Vec<Violation>> {
        let mut violations = Vec::new();
        let mut declared: BTreeMap<usize, usize> = BTreeMap::new();
        let mut axes: BTreeMap<SpatialAxis, Vec<usize>> = BTreeMap::new();
        let mut features: BTreeMap<VisualFeature, Vec<usize>> = BTreeMap::new();
        for &(dim, cat) in &self.entries {
            if dim >= n {
                violations.push(Violation::DimensionOutOfRange { dim, n });
                continue;
            }
            *declared.entry(dim).or_default() += 1;
            match cat {
                Category::Spatial(a) => axes.entry(a).or_default().push(dim),
                Category::Visual(f) => features.entry(f).or_default().push(dim),
                Category::Anonymous | Category::Skipped => {}
            }
        }
        violations.extend(
            declared
                .iter()
                .filter(|(_, &c)| c > 1)
                .map(|(&dim, _)| Violation::DimensionDeclaredTwice { dim }),
        );
        let missing: Vec<usize> = (0..n).filter(|d| !declared.contains_key(d)).collect();
        if !missing.is_empty() {
            violations.push(Violation::DimensionsNotCovered { dims: missing });
        }
        for (axis, mut dims) in axes {
            if dims.len() > 1 {
                dims.sort_unstable();
                violations.push(Violation::AxisAssignedTwice { axis, dims });
            }
        }
        for (feature, mut dims) in features {
            if dims.len() > 1 {
                dims.sort_unstable();
                violations.push(Violation::FeatureAssignedTwice { feature, dims });
            }
        }
        violations.sort();
        violations.dedup();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    pub fn counts(&self) -> Counts {
        let mut c = Counts {
            h_s: 0,
            h_v: 0,
            h_a: 0,
            skipped: 0,
        };
        for (_, cat) in &self.entries {
            match cat {
                Category::Spatial(_) => c.h_s += 1,
                Category::Visual(_) => c.h_v += 1,
                Category::Anonymous => c.h_a += 1,
                Category::Skipped => c.skipped += 1,
            }
        }
        c
    }

    /// Dimension indices marked anonymous, ascending.
    pub fn anonymous_dims(&self) -> Vec<usize> {
        let mut dims: Vec<usize> = self
            .entries
            .iter()
            .filter(|(_, c)| *c == Category::Anonymous)
            .map(|(d, _)| *d)
            .collect();
        dims.sort_unstable();
        dims
    }

    /// Dimension indices mapped to a spatial axis, ascending.
    pub fn spatial_dims(&self) -> Vec<usize> {
        let mut dims: Vec<usize> = self
            .entries
            .iter()
            .filter(|(_, c)| matches!(c, Category::Spatial(_)))
            .map(|(d, _)| *d)
            .collect();
        dims.sort_unstable();
        dims
    }

    /// Builds an assignment from the name-keyed file format. Dimensions the
    /// file does not mention are skipped.
    pub fn from_spec(spec: &AssignmentSpec, names: &[String]) -> Result<Self, AssignmentError> {
        let mut cats = vec![Category::Skipped; names.len()];
        for (name, entry) in &spec.0 {
            let dim = names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| AssignmentError::UnknownDimension(name.clone()))?;
            cats[dim] = entry.resolve(name)?;
        }
        let asgn = Self::dense(cats);
        asgn.validate(names.len()).map_err(AssignmentError::Invalid)?;
        Ok(asgn)
    }

    pub fn from_json(json: &str, names: &[String]) -> Result<Self, AssignmentError> {
        let spec: AssignmentSpec = serde_json::from_str(json)?;
        Self::from_spec(&spec, names)
    }

    pub fn to_spec(&self, names: &[String]) -> AssignmentSpec {
        let map = self
            .categories(names.len())
            .into_iter()
            .zip(names)
            .map(|(cat, name)| (name.clone(), EntrySpec::from(cat)))
            .collect();
        AssignmentSpec(map)
    }
}

#[derive(Debug, Error)]
pub enum AssignmentError {
    #[error("malformed assignment JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown dimension {0:?}")]
    UnknownDimension(String),
    #[error("dimension {name:?}: unknown target {target:?}")]
    UnknownTarget { name: String, target: String },
    #[error("dimension {0:?}: category needs a target")]
    MissingTarget(String),
    #[error("dimension {0:?}: category takes no target")]
    UnexpectedTarget(String),
    #[error("invalid assignment: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CategoryKind {
    Spatial,
    Visual,
    Anonymous,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntrySpec {
    pub category: CategoryKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
}

impl EntrySpec {
    fn resolve(&self, name: &str) -> Result<Category, AssignmentError> {
        let unknown = |t: &str| AssignmentError::UnknownTarget {
            name: name.to_string(),
            target: t.to_string(),
        };
        match (self.category, self.target.as_deref()) {
            (CategoryKind::Spatial, Some(t)) => {
                Ok(Category::Spatial(t.parse().map_err(|_| unknown(t))?))
            }
            (CategoryKind::Visual, Some(t)) => {
                Ok(Category::Visual(t.parse().map_err(|_| unknown(t))?))
            }
            (CategoryKind::Spatial | CategoryKind::Visual, None) => {
                Err(AssignmentError::MissingTarget(name.to_string()))
            }
            (CategoryKind::Anonymous | CategoryKind::Skipped, Some(_)) => {
                Err(AssignmentError::UnexpectedTarget(name.to_string()))
            }
            (CategoryKind::Anonymous, None) => Ok(Category::Anonymous),
            (CategoryKind::Skipped, None) => Ok(Category::Skipped),
        }
    }
}

impl From<Category> for EntrySpec {
    fn from(c: Category) -> Self {
        let (category, target) = match c {
            Category::Spatial(a) => (CategoryKind::Spatial, Some(a.name().to_string())),
            Category::Visual(f) => (CategoryKind::Visual, Some(f.name().to_string())),
            Category::Anonymous => (CategoryKind::Anonymous, None),
            Category::Skipped => (CategoryKind::Skipped, None),
        };
        Self { category, target }
    }
}

/// Name-keyed assignment file: `{"<dimension>": {"category": ..., "target": ...}}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AssignmentSpec(pub BTreeMap<String, EntrySpec>);

impl AssignmentSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn spatial(mut self, name: &str, axis: SpatialAxis) -> Self {
        self.0.insert(name.into(), Category::Spatial(axis).into());
        self
    }

    pub fn visual(mut self, name: &str, feature: VisualFeature) -> Self {
        self.0.insert(name.into(), Category::Visual(feature).into());
        self
    }

    pub fn anonymous(mut self, name: &str) -> Self {
        self.0.insert(name.into(), Category::Anonymous.into());
        self
    }

    pub fn skipped(mut self, name: &str) -> Self {
        self.0.insert(name.into(), Category::Skipped.into());
        self
    }
}
