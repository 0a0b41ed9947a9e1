//! Radio maps and SINR-constrained 3D path planning for cellular-connected
//! UAVs.
//!
//! The pipeline runs scene → per-GBS channel gain maps → expected-SINR map →
//! feasibility map → grid-graph shortest path, with evaluation helpers for
//! outage, Monte-Carlo validation and sweeps.

pub mod channel;
pub mod eval;
pub mod gainmap;
pub mod geometry;
pub mod planner;
pub mod rgm;
pub mod scene;
pub mod sinrmap;

pub use channel::{AntennaModel, ChannelError, ChannelParams, GainOverride};
pub use eval::{EvalError, OutageReport, SweepResult};
pub use gainmap::{build_gain_map, build_gain_maps, region_lattice, ChannelGainMap, MapError};
pub use geometry::{CellIndex, Lattice, Vec3};
pub use planner::{plan, MissionSpec, Path, PlanError, PlanMode, PlanningBasis};
pub use scene::{generate_scene, Gbs, Obstacle, Region, Scene, SceneConfig, SceneError};
pub use sinrmap::{
    build_feasible_map, build_sinr_map, quantize_feasible_map, FeasibleMap, QuantizedFeasibleMap,
    SinrMap,
};
