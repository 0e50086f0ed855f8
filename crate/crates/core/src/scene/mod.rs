//! From visible 4D points and visual rows to renderable 3D frames.

mod gltf;
mod mesh;

pub use self::gltf::{export_gltf, write_gltf, GltfOptions};
pub use self::mesh::{generate_glyph_mesh, GlyphMesh, Lod, MeshPart, ELONGATION_RANGE};

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assignment::VisualFeature;
use crate::numfmt::sig9;
use crate::projection::ProjectedData;
use crate::slab::{filter_visible, slab_mask, SlabConfig, SlabError, SlabMode};
use crate::view::{ViewError, ViewState};
use crate::{K, M};

pub const DEFAULT_DISTANCE: f64 = 4.0;
pub const DEFAULT_NEAR_EPSILON: f64 = 1e-3;
pub const DEFAULT_SIGMA_RANGE: f64 = 3.0;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("camera distance and near margin must be positive")]
    InvalidCamera,
    #[error("sigma range must be positive")]
    InvalidCalibration,
    #[error("{0} labels for {1} points")]
    LabelCount(usize, usize),
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
    #[error(transparent)]
    View(#[from] ViewError),
    #[error(transparent)]
    Slab(#[from] SlabError),
    #[error("malformed frame JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Perspective camera looking down the T axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CameraConfig {
    distance: f64,
    near_epsilon: f64,
}

impl Default for CameraConfig {
    fn default() -> Self {
        Self {
            distance: DEFAULT_DISTANCE,
            near_epsilon: DEFAULT_NEAR_EPSILON,
        }
    }
}

impl CameraConfig {
    pub fn new(distance: f64, near_epsilon: f64) -> Result<Self, SceneError> {
        if !(distance > 0.0 && near_epsilon > 0.0) || !distance.is_finite() {
            return Err(SceneError::InvalidCamera);
        }
        Ok(Self {
            distance,
            near_epsilon,
        })
    }

    pub fn with_distance(distance: f64) -> Result<Self, SceneError> {
        Self::new(distance, DEFAULT_NEAR_EPSILON)
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    pub fn near_epsilon(&self) -> f64 {
        self.near_epsilon
    }

    /// Magnification `d / (d − t)` for a point at depth `t`, if not culled.
    pub fn scale(&self, t: f64) -> Option<f64> {
        if t < self.distance - self.near_epsilon {
            Some(self.distance / (self.distance - t))
        } else {
            None
        }
    }
}

impl<'de> Deserialize<'de> for CameraConfig {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            distance: f64,
            #[serde(default = "default_eps")]
            near_epsilon: f64,
        }
        fn default_eps() -> f64 {
            DEFAULT_NEAR_EPSILON
        }
        let raw = Raw::deserialize(d)?;
        CameraConfig::new(raw.distance, raw.near_epsilon).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Perspective {
    pub positions: Vec<[f64; 3]>,
    pub depth: Vec<f64>,
    /// Input column of each kept point.
    pub kept: Vec<usize>,
    pub culled: usize,
}

/// Projects `4 × V` view-space points: `(x, y, z) · d / (d − t)`.
/// Points with `t ≥ d − near_epsilon` are culled.
pub fn perspective_project(points: &Array2<f64>, cam: &CameraConfig) -> Perspective {
    assert_eq!(points.nrows(), K);
    let mut out = Perspective {
        positions: Vec::with_capacity(points.ncols()),
        depth: Vec::with_capacity(points.ncols()),
        kept: Vec::with_capacity(points.ncols()),
        culled: 0,
    };
    for (j, p) in points.columns().into_iter().enumerate() {
        match cam.scale(p[3]) {
            Some(s) => {
                out.positions.push([p[0] * s, p[1] * s, p[2] * s]);
                out.depth.push(p[3]);
                out.kept.push(j);
            }
            None => out.culled += 1,
        }
    }
    out
}

/// Ten avatar parameters in `[0, 1]`, indexed by [`VisualFeature`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct AvatarParams([f64; M]);

impl AvatarParams {
    pub fn new(values: [f64; M]) -> Result<Self, SceneError> {
        if values.iter().all(|v| (0.0..=1.0).contains(v)) {
            Ok(Self(values))
        } else {
            Err(SceneError::InvalidFrame("avatar parameter outside [0, 1]".into()))
        }
    }

    pub fn neutral() -> Self {
        Self([0.5; M])
    }

    pub fn get(&self, f: VisualFeature) -> f64 {
        self.0[f.index()]
    }

    #[must_use]
    pub fn with(mut self, f: VisualFeature, value: f64) -> Self {
        self.0[f.index()] = value.clamp(0.0, 1.0);
        self
    }

    pub fn values(&self) -> &[f64; M] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for AvatarParams {
    type Error = SceneError;

    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        let arr: [f64; M] = v
            .try_into()
            .map_err(|v: Vec<f64>| SceneError::InvalidFrame(format!("{} params, expected {M}", v.len())))?;
        Self::new(arr)
    }
}

impl From<AvatarParams> for Vec<f64> {
    fn from(p: AvatarParams) -> Self {
        p.0.to_vec()
    }
}

/// Maps standardized visual values to `[0, 1]` through a symmetric sigma window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub sigma_range: f64,
}

impl Default for Calibration {
    fn default() -> Self {
        Self {
            sigma_range: DEFAULT_SIGMA_RANGE,
        }
    }
}

impl Calibration {
    pub fn new(sigma_range: f64) -> Result<Self, SceneError> {
        if sigma_range > 0.0 && sigma_range.is_finite() {
            Ok(Self { sigma_range })
        } else {
            Err(SceneError::InvalidCalibration)
        }
    }
}

/// `clamp(0.5 + v / (2c), 0, 1)` per feature.
pub fn avatar_params(visual: &[f64; M], calib: &Calibration) -> AvatarParams {
    let c = calib.sigma_range;
    AvatarParams(visual.map(|v| (0.5 + v / (2.0 * c)).clamp(0.0, 1.0)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FramePoint {
    /// Column index of the point in the source dataset.
    pub index: usize,
    pub position: [f64; 3],
    /// T coordinate after the view transform.
    pub depth: f64,
    pub params: AvatarParams,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneFrame {
    pub seq: u64,
    pub n_total: usize,
    pub points: Vec<FramePoint>,
    /// Points inside the slab that were dropped by the near-plane cull.
    /// Not part of the wire format.
    pub culled: usize,
}

impl SceneFrame {
    pub fn empty(seq: u64, n_total: usize) -> Self {
        Self {
            seq,
            n_total,
            points: Vec::new(),
            culled: 0,
        }
    }

    pub fn n_visible(&self) -> usize {
        self.points.len()
    }

    /// Canonical JSON: fixed key order, no whitespace, floats rounded to 9
    /// significant digits.
    pub fn to_json(&self) -> String {
        let mut s = String::with_capacity(64 + self.points.len() * 160);
        s.push_str(&format!(
            "{{\"seq\":{},\"n_total\":{},\"n_visible\":{},\"points\":[",
            self.seq,
            self.n_total,
            self.points.len()
        ));
        for (k, p) in self.points.iter().enumerate() {
            if k > 0 {
                s.push(',');
            }
            s.push_str(&format!("{{\"i\":{},\"pos\":[", p.index));
            push_list(&mut s, &p.position);
            s.push_str("],\"depth\":");
            s.push_str(&sig9(p.depth));
            s.push_str(",\"params\":[");
            push_list(&mut s, p.params.values());
            s.push_str("],\"label\":");
            match &p.label {
                Some(l) => s.push_str(&serde_json::to_string(l).expect("string serializes")),
                None => s.push_str("null"),
            }
            s.push('}');
        }
        s.push_str("]}");
        s
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.to_json().into_bytes()
    }

    pub fn from_json(text: &str) -> Result<Self, SceneError> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct RawPoint {
            i: usize,
            pos: [f64; 3],
            depth: f64,
            params: AvatarParams,
            label: Option<String>,
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            seq: u64,
            n_total: usize,
            n_visible: usize,
            points: Vec<RawPoint>,
        }
        let raw: Raw = serde_json::from_str(text)?;
        if raw.n_visible != raw.points.len() {
            return Err(SceneError::InvalidFrame(format!(
                "n_visible {} but {} points",
                raw.n_visible,
                raw.points.len()
            )));
        }
        if raw.n_visible > raw.n_total {
            return Err(SceneError::InvalidFrame("n_visible exceeds n_total".into()));
        }
        Ok(Self {
            seq: raw.seq,
            n_total: raw.n_total,
            culled: 0,
            points: raw
                .points
                .into_iter()
                .map(|p| FramePoint {
                    index: p.i,
                    position: p.pos,
                    depth: p.depth,
                    params: p.params,
                    label: p.label,
                })
                .collect(),
        })
    }
}

fn push_list(s: &mut String, values: &[f64]) {
    for (k, v) in values.iter().enumerate() {
        if k > 0 {
            s.push(',');
        }
        s.push_str(&sig9(*v));
    }
}

/// Everything besides the data that shapes a frame.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FrameSettings {
    pub slab: SlabConfig,
    pub camera: CameraConfig,
    pub calibration: Calibration,
}

/// View → slab → perspective → avatar parameters.
pub fn build_frame(
    projected: &ProjectedData,
    vs: &ViewState,
    settings: &FrameSettings,
    labels: Option<&[String]>,
    seq: u64,
) -> Result<SceneFrame, SceneError> {
    let n_total = projected.len();
    if let Some(l) = labels {
        if l.len() != n_total {
            return Err(SceneError::LabelCount(l.len(), n_total));
        }
    }
    let view = vs.apply(&projected.spatial)?;
    let mask = match settings.slab.mode() {
        SlabMode::PostView => slab_mask(&view, &settings.slab, vs),
        SlabMode::PreView => slab_mask(&projected.spatial, &settings.slab, vs),
    };
    let visible = filter_visible(&view, &projected.visual, labels, &mask)?;
    let persp = perspective_project(&visible.points, &settings.camera);

    let mut points = Vec::with_capacity(persp.kept.len());
    for (k, &col) in persp.kept.iter().enumerate() {
        let mut v = [0.0; M];
        for (r, slot) in v.iter_mut().enumerate() {
            *slot = visible.visuals[[r, col]];
        }
        points.push(FramePoint {
            index: visible.indices[col],
            position: persp.positions[k],
            depth: persp.depth[k],
            params: avatar_params(&v, &settings.calibration),
            label: visible.labels.as_ref().map(|l| l[col].clone()),
        });
    }
    Ok(SceneFrame {
        seq,
        n_total,
        points,
        culled: persp.culled,
    })
}
