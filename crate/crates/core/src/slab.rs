//! Thick-slice filtering: keep points whose signed distance to the viewing
//! hyperplane is below a threshold.

use std::str::FromStr;

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::view::ViewState;
use crate::K;

pub const DEFAULT_THRESHOLD: f64 = 1.5;

#[derive(Debug, Error, PartialEq)]
pub enum SlabError {
    #[error("threshold must be positive")]
    NonPositiveThreshold,
    #[error("mask has {mask} entries for {points} points")]
    LengthMismatch { mask: usize, points: usize },
    #[error("unknown slab mode {0:?} (expected \"post-view\" or \"pre-view\")")]
    UnknownMode(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlabMode {
    /// Canonical normal `[0, 0, 0, 1]` applied to view-space points.
    #[default]
    PostView,
    /// Last row of the rotation applied to untransformed spatial points.
    /// Ignores translation.
    PreView,
}

impl FromStr for SlabMode {
    type Err = SlabError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "post-view" | "post" => Ok(Self::PostView),
            "pre-view" | "pre" => Ok(Self::PreView),
            other => Err(SlabError::UnknownMode(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlabConfig {
    threshold: f64,
    mode: SlabMode,
}

impl Default for SlabConfig {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            mode: SlabMode::PostView,
        }
    }
}

impl SlabConfig {
    pub fn new(threshold: f64, mode: SlabMode) -> Result<Self, SlabError> {
        // NaN fails this comparison too.
        if !(threshold > 0.0) {
            return Err(SlabError::NonPositiveThreshold);
        }
        Ok(Self { threshold, mode })
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn mode(&self) -> SlabMode {
        self.mode
    }

    /// Slab normal for this mode under view `vs`.
    pub fn normal(&self, vs: &ViewState) -> [f64; K] {
        match self.mode {
            SlabMode::PostView => [0.0, 0.0, 0.0, 1.0],
            SlabMode::PreView => vs.rotation()[K - 1],
        }
    }
}

impl<'de> Deserialize<'de> for SlabConfig {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            threshold: f64,
            #[serde(default)]
            mode: SlabMode,
        }
        let raw = Raw::deserialize(d)?;
        SlabConfig::new(raw.threshold, raw.mode).map_err(serde::de::Error::custom)
    }
}

/// `|n · p| < threshold` per column of `points`.
///
/// `points` must be view-space for [`SlabMode::PostView`] and untransformed
/// spatial coordinates for [`SlabMode::PreView`].
pub fn slab_mask(points: &Array2<f64>, cfg: &SlabConfig, vs: &ViewState) -> Vec<bool> {
    assert_eq!(points.nrows(), K, "slab_mask expects {K}-row points");
    let n = cfg.normal(vs);
    points
        .columns()
        .into_iter()
        .map(|p| {
            let d = n[0] * p[0] + n[1] * p[1] + n[2] * p[2] + n[3] * p[3];
            d.abs() < cfg.threshold
        })
        .collect()
}

/// Points, visuals and labels that survived a mask, original order preserved.
#[derive(Debug, Clone, PartialEq)]
pub struct Visible {
    pub points: Array2<f64>,
    pub visuals: Array2<f64>,
    pub labels: Option<Vec<String>>,
    /// Source column index of each surviving point.
    pub indices: Vec<usize>,
}

pub fn filter_visible(
    points: &Array2<f64>,
    visuals: &Array2<f64>,
    labels: Option<&[String]>,
    mask: &[bool],
) -> Result<Visible, SlabError> {
    let n = points.ncols();
    let bad = |len: usize| SlabError::LengthMismatch { mask: mask.len(), points: len };
    if mask.len() != n {
        return Err(bad(n));
    }
    if visuals.ncols() != n {
        return Err(bad(visuals.ncols()));
    }
    if let Some(l) = labels {
        if l.len() != n {
            return Err(bad(l.len()));
        }
    }
    let indices: Vec<usize> = (0..n).filter(|&i| mask[i]).collect();
    Ok(Visible {
        points: points.select(ndarray::Axis(1), &indices),
        visuals: visuals.select(ndarray::Axis(1), &indices),
        labels: labels.map(|l| indices.iter().map(|&i| l[i].clone()).collect()),
        indices,
    })
}
