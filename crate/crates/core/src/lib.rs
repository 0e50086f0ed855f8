//! Visualize an n-dimensional point cloud as a swarm of parametric 3D avatars.
//!
//! The pipeline runs in five stages:
//!
//! 1. [`dataset`] ingests a table into an `n × N` matrix (dimensions are rows,
//!    points are columns).
//! 2. [`assignment`] records which dimensions drive spatial axes, which drive
//!    avatar features, which are left anonymous and which are skipped.
//! 3. [`projection`] builds the filtering matrix (one-hot rows plus principal
//!    components of the anonymous block), applies it and standardizes the
//!    result into spatial and visual parts.
//! 4. [`view`] rotates and pans the 4D spatial embedding; [`slab`] keeps only
//!    points near the viewing hyperplane.
//! 5. [`scene`] projects the survivors to 3D, calibrates avatar parameters and
//!    serializes frames (or exports glTF meshes).
//!
//! [`session`] ties the stages together behind a deterministic command log.

pub mod assignment;
pub mod dataset;
pub mod projection;
pub mod scene;
pub mod session;
pub mod slab;
pub mod view;

mod numfmt;

pub use assignment::{Category, DimensionAssignment, SpatialAxis, VisualFeature};
pub use dataset::{Dataset, LoadOptions, MissingPolicy};
pub use projection::{FilterMatrix, PcaReport, ProjectedData};
pub use scene::{AvatarParams, CameraConfig, SceneFrame};
pub use session::{Command, Session};
pub use slab::{SlabConfig, SlabMode};
pub use view::{RotationPlane, ViewState};

/// Number of navigable spatial axes.
pub const K: usize = 4;
/// Number of avatar visual features.
pub const M: usize = 10;
