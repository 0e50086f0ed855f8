//! Exploration sessions driven by an ordered command log.
//!
//! A [`Session`] owns one dataset, an optional assignment with its cached
//! projection, and the view/slab/camera state. Commands apply atomically: a
//! failed command leaves the session untouched.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assignment::{AssignmentError, AssignmentSpec, Counts, DimensionAssignment};
use crate::dataset::{self, Dataset, DatasetError, LoadOptions, MissingPolicy, SyntheticSpec};
use crate::projection::{self, FilterMatrix, PcaReport, PcaReportOptions, ProjectedData, ProjectionError};
use crate::scene::{build_frame, CameraConfig, Calibration, FrameSettings, SceneError, SceneFrame};
use crate::slab::{SlabConfig, SlabError, SlabMode};
use crate::view::{RotationPlane, ViewState};
use crate::K;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("assignment required")]
    AssignmentRequired,
    #[error("unknown dataset {0:?}")]
    UnknownDataset(String),
    #[error("unknown session {0:?}")]
    UnknownSession(String),
    #[error("{0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Assignment(#[from] AssignmentError),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error(transparent)]
    Slab(#[from] SlabError),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error("malformed command: {0}")]
    Malformed(#[from] serde_json::Error),
}

/// CSV file read on the server side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvSource {
    pub path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delimiter: Option<char>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_column: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub missing_policy: Option<MissingPolicy>,
}

impl CsvSource {
    pub fn load_options(&self) -> Result<LoadOptions, SessionError> {
        let delimiter = match self.delimiter {
            None => b',',
            Some(c) if c.is_ascii() => c as u8,
            Some(c) => {
                return Err(SessionError::InvalidParameter(format!(
                    "delimiter {c:?} is not ASCII"
                )))
            }
        };
        Ok(LoadOptions {
            delimiter,
            label_column: self.label_column.clone(),
            missing_policy: self.missing_policy.unwrap_or_default(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetSource {
    Csv(CsvSource),
    Synthetic(SyntheticSpec),
    /// A dataset already held by the [`DatasetStore`].
    Registered(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Command {
    LoadDataset {
        source: DatasetSource,
    },
    SetAssignment {
        assignment: AssignmentSpec,
    },
    Rotate {
        plane: RotationPlane,
        /// Radians.
        angle: f64,
    },
    Translate {
        delta: [f64; K],
    },
    SetSlab {
        threshold: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mode: Option<SlabMode>,
    },
    SetCamera {
        distance: f64,
    },
    RequestFrame,
    GetPcaReport {
        #[serde(default)]
        options: PcaReportOptions,
    },
}

impl Command {
    pub fn from_json(text: &str) -> Result<Self, SessionError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("commands serialize")
    }
}

/// Datasets available to sessions, keyed by id.
#[derive(Debug, Default)]
pub struct DatasetStore {
    datasets: BTreeMap<String, Arc<Dataset>>,
    next_id: u64,
}

impl DatasetStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, ds: Dataset) -> String {
        self.next_id += 1;
        let id = format!("ds-{}", self.next_id);
        self.datasets.insert(id.clone(), Arc::new(ds));
        id
    }

    pub fn get(&self, id: &str) -> Option<Arc<Dataset>> {
        self.datasets.get(id).cloned()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.datasets.keys().map(String::as_str)
    }

    pub fn resolve(&self, source: &DatasetSource) -> Result<Arc<Dataset>, SessionError> {
        match source {
            DatasetSource::Csv(csv) => Ok(Arc::new(dataset::load_csv(&csv.path, &csv.load_options()?)?)),
            DatasetSource::Synthetic(spec) => Ok(Arc::new(dataset::generate_synthetic(spec)?)),
            DatasetSource::Registered(id) => {
                self.get(id).ok_or_else(|| SessionError::UnknownDataset(id.clone()))
            }
        }
    }
}

/// Projection cached for the current (dataset, assignment) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Pipeline {
    pub assignment: DimensionAssignment,
    pub filter: FilterMatrix,
    pub projected: ProjectedData,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetInfo {
    pub source: String,
    pub n: usize,
    pub n_total: usize,
    pub names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateSummary {
    pub session: String,
    pub version: u64,
    pub next_seq: u64,
    pub dataset: DatasetInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<Counts>,
    pub view: ViewState,
    pub slab: SlabConfig,
    pub camera: CameraConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Reply {
    State(StateSummary),
    Frame(SceneFrame),
    PcaReport(PcaReport),
}

impl Reply {
    pub fn to_json(&self) -> String {
        match self {
            Reply::State(s) => serde_json::to_string(s).expect("state serializes"),
            Reply::Frame(f) => f.to_json(),
            Reply::PcaReport(r) => serde_json::to_string(r).expect("report serializes"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Session {
    id: String,
    dataset: Arc<Dataset>,
    pipeline: Option<Arc<Pipeline>>,
    view: ViewState,
    settings: FrameSettings,
    version: u64,
    next_seq: u64,
}

impl Session {
    /// Identity view, default slab and camera, no assignment.
    pub fn new(id: impl Into<String>, dataset: Arc<Dataset>) -> Self {
        Self {
            id: id.into(),
            dataset,
            pipeline: None,
            view: ViewState::identity(),
            settings: FrameSettings::default(),
            version: 0,
            next_seq: 1,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dataset(&self) -> &Arc<Dataset> {
        &self.dataset
    }

    pub fn pipeline(&self) -> Option<&Arc<Pipeline>> {
        self.pipeline.as_ref()
    }

    pub fn view(&self) -> &ViewState {
        &self.view
    }

    pub fn settings(&self) -> &FrameSettings {
        &self.settings
    }

    /// Incremented by every state change.
    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn summary(&self) -> StateSummary {
        StateSummary {
            session: self.id.clone(),
            version: self.version,
            next_seq: self.next_seq,
            dataset: DatasetInfo {
                source: self.dataset.source().to_string(),
                n: self.dataset.dims(),
                n_total: self.dataset.len(),
                names: self.dataset.names().to_vec(),
            },
            counts: self.pipeline.as_ref().map(|p| p.assignment.counts()),
            view: self.view,
            slab: self.settings.slab,
            camera: self.settings.camera,
        }
    }

    pub fn set_calibration(&mut self, calibration: Calibration) {
        self.settings.calibration = calibration;
        self.version += 1;
    }

    fn changed(&mut self) -> Reply {
        self.version += 1;
        Reply::State(self.summary())
    }

    pub fn dispatch(&mut self, cmd: &Command, store: &DatasetStore) -> Result<Reply, SessionError> {
        match cmd {
            Command::LoadDataset { source } => {
                let ds = store.resolve(source)?;
                self.dataset = ds;
                self.pipeline = None;
                Ok(self.changed())
            }
            Command::SetAssignment { assignment } => {
                let asgn = DimensionAssignment::from_spec(assignment, self.dataset.names())?;
                let (filter, projected) = projection::project(&self.dataset, &asgn)?;
                self.pipeline = Some(Arc::new(Pipeline {
                    assignment: asgn,
                    filter,
                    projected,
                }));
                Ok(self.changed())
            }
            Command::Rotate { plane, angle } => {
                finite("angle", *angle)?;
                self.view = self.view.rotate(*plane, *angle);
                Ok(self.changed())
            }
            Command::Translate { delta } => {
                for v in delta {
                    finite("translation", *v)?;
                }
                self.view = self.view.translate(*delta);
                Ok(self.changed())
            }
            Command::SetSlab { threshold, mode } => {
                let mode = mode.unwrap_or(self.settings.slab.mode());
                self.settings.slab = SlabConfig::new(*threshold, mode)?;
                Ok(self.changed())
            }
            Command::SetCamera { distance } => {
                self.settings.camera = CameraConfig::new(*distance, self.settings.camera.near_epsilon())?;
                Ok(self.changed())
            }
            Command::RequestFrame => Ok(Reply::Frame(self.frame()?)),
            Command::GetPcaReport { options } => {
                let pipeline = self.pipeline.as_ref().ok_or(SessionError::AssignmentRequired)?;
                Ok(Reply::PcaReport(projection::pca_report(
                    &self.dataset,
                    &pipeline.assignment,
                    *options,
                )?))
            }
        }
    }

    /// Builds a frame from the current state and advances the sequence number.
    pub fn frame(&mut self) -> Result<SceneFrame, SessionError> {
        let pipeline = self.pipeline.as_ref().ok_or(SessionError::AssignmentRequired)?;
        let frame = build_frame(
            &pipeline.projected,
            &self.view,
            &self.settings,
            self.dataset.labels(),
            self.next_seq,
        )?;
        self.next_seq += 1;
        Ok(frame)
    }
}

fn finite(what: &str, v: f64) -> Result<(), SessionError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(SessionError::InvalidParameter(format!("{what} must be finite")))
    }
}

/// Single-threaded registry of datasets and sessions.
#[derive(Debug, Default)]
pub struct Workspace {
    pub datasets: DatasetStore,
    sessions: BTreeMap<String, Session>,
    next_session: u64,
}

impl Workspace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn create_session(&mut self, dataset_id: &str) -> Result<String, SessionError> {
        let ds = self
            .datasets
            .get(dataset_id)
            .ok_or_else(|| SessionError::UnknownDataset(dataset_id.to_string()))?;
        self.next_session += 1;
        let id = format!("session-{}", self.next_session);
        self.sessions.insert(id.clone(), Session::new(id.clone(), ds));
        Ok(id)
    }

    pub fn session(&self, id: &str) -> Option<&Session> {
        self.sessions.get(id)
    }

    pub fn dispatch(&mut self, id: &str, cmd: &Command) -> Result<Reply, SessionError> {
        let session = self
            .sessions
            .get_mut(id)
            .ok_or_else(|| SessionError::UnknownSession(id.to_string()))?;
        session.dispatch(cmd, &self.datasets)
    }
}

/// Parses a command log: one JSON command per line, blank lines and `#`
/// comments ignored.
pub fn parse_log(text: &str) -> Result<Vec<Command>, SessionError> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(Command::from_json)
        .collect()
}

/// Replays `log` against a fresh session and returns the serialized reply
/// (or error message) of every command. The first command must load the
/// dataset the session starts from.
pub fn replay(log: &[Command], store: &DatasetStore) -> Result<Vec<Result<String, String>>, SessionError> {
    let Some(Command::LoadDataset { source }) = log.first() else {
        return Err(SessionError::InvalidParameter(
            "a replay log must start with load_dataset".into(),
        ));
    };
    let mut session = Session::new("replay", store.resolve(source)?);
    let mut out = vec![Ok(session.changed().to_json())];
    out.extend(log[1..].iter().map(|cmd| {
        session
            .dispatch(cmd, store)
            .map(|r| r.to_json())
            .map_err(|e| e.to_string())
    }));
    Ok(out)
}
