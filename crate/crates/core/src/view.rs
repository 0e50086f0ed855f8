//! 4D navigation: rotations in the six coordinate planes plus translation.

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assignment::SpatialAxis;
use crate::K;

pub type Mat4 = [[f64; K]; K];
pub type Vec4 = [f64; K];

/// Orthogonality drift that triggers re-orthonormalization.
pub const MAX_DRIFT: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum ViewError {
    #[error("spatial matrix must have {K} rows, got {0}")]
    DimensionMismatch(usize),
    #[error("rotation is not orthonormal (drift {0:e})")]
    NotOrthonormal(f64),
    #[error("non-finite view parameter")]
    NonFinite,
    #[error("unknown rotation plane {0:?}")]
    UnknownPlane(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RotationPlane {
    XY,
    XZ,
    XT,
    YZ,
    YT,
    ZT,
}

impl RotationPlane {
    pub const ALL: [RotationPlane; 6] = [Self::XY, Self::XZ, Self::XT, Self::YZ, Self::YT, Self::ZT];

    /// Axis pair `(i, j)` with `i < j`.
    pub fn axes(self) -> (SpatialAxis, SpatialAxis) {
        use SpatialAxis::*;
        match self {
            Self::XY => (X, Y),
            Self::XZ => (X, Z),
            Self::XT => (X, T),
            Self::YZ => (Y, Z),
            Self::YT => (Y, T),
            Self::ZT => (Z, T),
        }
    }

    /// True for planes that leave the T axis fixed.
    pub fn within_xyz(self) -> bool {
        matches!(self, Self::XY | Self::XZ | Self::YZ)
    }
}

impl fmt::Display for RotationPlane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.axes();
        write!(f, "{a}{b}")
    }
}

impl FromStr for RotationPlane {
    type Err = ViewError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let up = s.to_ascii_uppercase();
        Self::ALL
            .into_iter()
            .find(|p| p.to_string() == up)
            .ok_or_else(|| ViewError::UnknownPlane(s.to_string()))
    }
}

pub fn identity() -> Mat4 {
    let mut m = [[0.0; K]; K];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

/// Rotation by `angle` radians in `plane`; a positive angle turns the first
/// axis of the plane toward the second.
pub fn plane_rotation(plane: RotationPlane, angle: f64) -> Mat4 {
    let (a, b) = plane.axes();
    let (i, j) = (a.index(), b.index());
    let (s, c) = angle.sin_cos();
    let mut m = identity();
    m[i][i] = c;
    m[j][j] = c;
    m[i][j] = -s;
    m[j][i] = s;
    m
}

pub fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[0.0; K]; K];
    for i in 0..K {
        for j in 0..K {
            out[i][j] = (0..K).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn transpose(a: &Mat4) -> Mat4 {
    let mut out = [[0.0; K]; K];
    for i in 0..K {
        for j in 0..K {
            out[i][j] = a[j][i];
        }
    }
    out
}

/// `‖RᵀR − I‖∞` (max absolute entry).
pub fn orthogonality_drift(r: &Mat4) -> f64 {
    let g = mat_mul(&transpose(r), r);
    let mut worst: f64 = 0.0;
    for (i, row) in g.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v - target).abs());
        }
    }
    worst
}

pub fn determinant(m: &Mat4) -> f64 {
    // Laplace expansion along the first row using 3×3 minors.
    let minor = |col: usize| -> f64 {
        let cols: Vec<usize> = (0..K).filter(|&c| c != col).collect();
        let r = |i: usize, j: usize| m[i][cols[j]];
        r(1, 0) * (r(2, 1) * r(3, 2) - r(2, 2) * r(3, 1))
            - r(1, 1) * (r(2, 0) * r(3, 2) - r(2, 2) * r(3, 0))
            + r(1, 2) * (r(2, 0) * r(3, 1) - r(2, 1) * r(3, 0))
    };
    (0..K)
        .map(|c| {
            let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
            sign * m[0][c] * minor(c)
        })
        .sum()
}

/// Modified Gram–Schmidt over the rows of `r`.
pub fn reorthonormalize(r: &Mat4) -> Mat4 {
    let mut out = *r;
    for i in 0..K {
        for j in 0..i {
            let proj: f64 = (0..K).map(|k| out[i][k] * out[j][k]).sum();
            for k in 0..K {
                out[i][k] -= proj * out[j][k];
            }
        }
        let norm = out[i].iter().map(|x| x * x).sum::<f64>().sqrt();
        out[i].iter_mut().for_each(|x| *x /= norm);
    }
    out
}

/// Rotation plus translation of the 4D spatial embedding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViewState {
    rotation: Mat4,
    translation: Vec4,
}

impl Default for ViewState {
    fn default() -> Self {
        Self::identity()
    }
}

impl ViewState {
    pub fn identity() -> Self {
        Self {
            rotation: identity(),
            translation: [0.0; K],
        }
    }

    pub fn from_parts(rotation: Mat4, translation: Vec4) -> Result<Self, ViewError> {
        if rotation.iter().flatten().chain(&translation).any(|v| !v.is_finite()) {
            return Err(ViewError::NonFinite);
        }
        let drift = orthogonality_drift(&rotation);
        if drift > 1e-9 || (determinant(&rotation) - 1.0).abs() > 1e-9 {
            return Err(ViewError::NotOrthonormal(drift));
        }
        Ok(Self {
            rotation,
            translation,
        })
    }

    pub fn rotation(&self) -> &Mat4 {
        &self.rotation
    }

    pub fn translation(&self) -> &Vec4 {
        &self.translation
    }

    /// Pre-multiplies a plane rotation, so planes stay fixed in the observer frame.
    #[must_use]
    pub fn rotate(&self, plane: RotationPlane, angle: f64) -> Self {
        let mut rotation = mat_mul(&plane_rotation(plane, angle), &self.rotation);
        if orthogonality_drift(&rotation) > MAX_DRIFT {
            rotation = reorthonormalize(&rotation);
        }
        Self {
            rotation,
            translation: self.translation,
        }
    }

    #[must_use]
    pub fn translate(&self, delta: Vec4) -> Self {
        let mut translation = self.translation;
        for (t, d) in translation.iter_mut().zip(delta) {
            *t += d;
        }
        Self {
            rotation: self.rotation,
            translation,
        }
    }

    /// The `(K+1) × (K+1)` homogeneous matrix.
    pub fn homogeneous(&self) -> [[f64; K + 1]; K + 1] {
        let mut v = [[0.0; K + 1]; K + 1];
        for i in 0..K {
            v[i][..K].copy_from_slice(&self.rotation[i]);
            v[i][K] = self.translation[i];
        }
        v[K][K] = 1.0;
        v
    }

    pub fn apply_point(&self, p: &Vec4) -> Vec4 {
        let mut out = [0.0; K];
        for (i, o) in out.iter_mut().enumerate() {
            let r = &self.rotation[i];
            *o = r[0] * p[0] + r[1] * p[1] + r[2] * p[2] + r[3] * p[3] + self.translation[i];
        }
        out
    }

    /// `R · X + t` for a `K × N` matrix.
    pub fn apply(&self, spatial: &Array2<f64>) -> Result<Array2<f64>, ViewError> {
        if spatial.nrows() != K {
            return Err(ViewError::DimensionMismatch(spatial.nrows()));
        }
        let n = spatial.ncols();
        let mut out = Array2::zeros((K, n));
        for j in 0..n {
            let p = [spatial[[0, j]], spatial[[1, j]], spatial[[2, j]], spatial[[3, j]]];
            let q = self.apply_point(&p);
            for i in 0..K {
                out[[i, j]] = q[i];
            }
        }
        Ok(out)
    }
}

/// Wire form: `{"rotation": [16 numbers, row-major], "translation": [4 numbers]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViewStateJson {
    pub rotation: Vec<f64>,
    pub translation: Vec<f64>,
}

impl From<&ViewState> for ViewStateJson {
    fn from(v: &ViewState) -> Self {
        Self {
            rotation: v.rotation.iter().flatten().copied().collect(),
            translation: v.translation.to_vec(),
        }
    }
}

impl TryFrom<ViewStateJson> for ViewState {
    type Error = ViewError;

    fn try_from(j: ViewStateJson) -> Result<Self, Self::Error> {
        if j.rotation.len() != K * K || j.translation.len() != K {
            return Err(ViewError::DimensionMismatch(j.translation.len()));
        }
        let mut rotation = [[0.0; K]; K];
        for (i, row) in rotation.iter_mut().enumerate() {
            row.copy_from_slice(&j.rotation[i * K..(i + 1) * K]);
        }
        let mut translation = [0.0; K];
        translation.copy_from_slice(&j.translation);
        ViewState::from_parts(rotation, translation)
    }
}

impl Serialize for ViewState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ViewStateJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ViewState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = ViewStateJson::deserialize(d)?;
        ViewState::try_from(j).map_err(serde::de::Error::custom)
    }
}
