//! SINR-constrained path planning as shortest paths on grid graphs.

mod graph;
mod search;

pub use graph::{
    build_graph, build_outage_graph, build_quantized_graph, default_bridge_radius, GraphMode,
    GridGraph,
};
pub use search::{check_feasibility, shortest_path, NoPathReason, Route};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{AntennaModel, ChannelParams, GainOverride};
use crate::eval::outage_along;
use crate::gainmap::{build_gain_maps, MapError};
use crate::geometry::{lattice_polyline_length, CellIndex, Lattice, Vec3};
use crate::scene::Scene;
use crate::sinrmap::{
    build_feasible_map, build_sinr_map, quantize_feasible_map, FeasibleMap, SinrMap,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlanMode {
    Optimal,
    Quantized {
        kappa_xy: usize,
        kappa_z: usize,
    },
    OutageTolerant {
        max_outage_m: f64,
        /// Chebyshev reach of bridges in cells; `None` picks the default.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bridge_radius: Option<usize>,
    },
}

impl PlanMode {
    pub fn label(&self) -> String {
        match self {
            PlanMode::Optimal => "optimal".into(),
            PlanMode::Quantized { kappa_xy, kappa_z } => format!("quantized({kappa_xy},{kappa_z})"),
            PlanMode::OutageTolerant { max_outage_m, .. } => {
                format!("outage_tolerant({max_outage_m})")
            }
        }
    }
}

/// Which SINR map the planner trusts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlanningBasis {
    Actual,
    /// Every loading factor raised to `l_max`.
    WorstCaseLoad {
        l_max: f64,
    },
    ZeroLoad,
    AllLos,
    AllNlos,
}

impl PlanningBasis {
    pub fn label(&self) -> String {
        match self {
            PlanningBasis::Actual => "actual".into(),
            PlanningBasis::WorstCaseLoad { l_max } => format!("worst_case_load({l_max})"),
            PlanningBasis::ZeroLoad => "zero_load".into(),
            PlanningBasis::AllLos => "all_los".into(),
            PlanningBasis::AllNlos => "all_nlos".into(),
        }
    }

    pub fn loads(&self, actual: &[f64]) -> Vec<f64> {
        match *self {
            PlanningBasis::WorstCaseLoad { l_max } => vec![l_max; actual.len()],
            PlanningBasis::ZeroLoad => vec![0.0; actual.len()],
            _ => actual.to_vec(),
        }
    }

    pub fn gain_override(&self) -> GainOverride {
        match self {
            PlanningBasis::AllLos => GainOverride::ForceLos,
            PlanningBasis::AllNlos => GainOverride::ForceNlos,
            _ => GainOverride::Auto,
        }
    }
}

/// Builds the SINR map a planner using `basis` would see.
pub fn build_basis_sinr_map(
    scene: &Scene,
    params: &ChannelParams,
    antenna: &AntennaModel,
    lattice: &Lattice,
    epsilon_db: f64,
    basis: PlanningBasis,
) -> Result<SinrMap, MapError> {
    let gains = build_gain_maps(
        scene,
        params,
        antenna,
        lattice,
        epsilon_db,
        basis.gain_override(),
    )?;
    build_sinr_map(&gains, &basis.loads(&scene.loads()), params, lattice)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionSpec {
    pub start: Vec3,
    pub goal: Vec3,
    pub speed_mps: f64,
    pub gamma_t_db: f64,
    pub mode: PlanMode,
    pub basis: PlanningBasis,
}

impl MissionSpec {
    pub fn validate(&self) -> Result<(), PlanError> {
        let bad = |m: &str| Err(PlanError::InvalidMission(m.into()));
        if !(self.speed_mps > 0.0 && self.speed_mps.is_finite()) {
            return bad("speed must be positive");
        }
        if self.gamma_t_db.is_nan() {
            return bad("SINR target is NaN");
        }
        if !self.start.is_finite() || !self.goal.is_finite() {
            return bad("endpoints must be finite");
        }
        match self.mode {
            PlanMode::OutageTolerant { max_outage_m, .. }
                if !(max_outage_m >= 0.0 && max_outage_m.is_finite()) =>
            {
                bad("outage tolerance must be non-negative")
            }
            PlanMode::Quantized { kappa_xy, kappa_z } if kappa_xy == 0 || kappa_z == 0 => {
                bad("quantization ratios must be positive")
            }
            _ => match self.basis {
                PlanningBasis::WorstCaseLoad { l_max } if !(0.0..=1.0).contains(&l_max) => {
                    bad("l_max must lie in [0, 1]")
                }
                _ => Ok(()),
            },
        }
    }
}

/// A planned flight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub waypoints: Vec<Vec3>,
    pub length_m: f64,
    pub duration_s: f64,
    pub n_waypoints: usize,
    /// Length flown through cells below target on the actual map.
    pub outage_m: f64,
    /// Part of `outage_m` lying outside the mapped volume.
    pub outside_m: f64,
    pub feasible: bool,
}

impl Path {
    /// Path through fine-lattice points; consecutive repeats are dropped.
    pub fn from_lattice_points(lattice: &Lattice, points: &[[i64; 3]], speed_mps: f64) -> Self {
        let mut pts: Vec<[i64; 3]> = Vec::with_capacity(points.len());
        for &p in points {
            if pts.last() != Some(&p) {
                pts.push(p);
            }
        }
        let length_m = lattice_polyline_length(&pts, lattice.delta);
        let waypoints: Vec<Vec3> = pts
            .iter()
            .map(|p| lattice.position([p[0] as usize, p[1] as usize, p[2] as usize]))
            .collect();
        Self {
            n_waypoints: waypoints.len(),
            waypoints,
            length_m,
            duration_s: length_m / speed_mps,
            outage_m: 0.0,
            outside_m: 0.0,
            feasible: true,
        }
    }

    pub fn outage_fraction(&self) -> f64 {
        if self.length_m > 0.0 {
            (self.outage_m / self.length_m).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("invalid mission: {0}")]
    InvalidMission(String),
    #[error("{which} point {point:?} is not on the planning grid")]
    OffGrid {
        which: &'static str,
        point: [f64; 3],
    },
    #[error(
        "no path (start feasible: {}, goal feasible: {}, connected: {})",
        .0.start_feasible, .0.goal_feasible, .0.connected
    )]
    NoPath(NoPathReason),
    #[error(transparent)]
    Map(#[from] MapError),
}

fn as_point(c: CellIndex) -> [i64; 3] {
    [c[0] as i64, c[1] as i64, c[2] as i64]
}

/// Outage-tolerant search on the bridge-extended graph.
pub fn plan_outage_tolerant(
    feasible: &FeasibleMap,
    max_outage_m: f64,
    bridge_radius: Option<usize>,
    start: CellIndex,
    goal: CellIndex,
) -> Result<Route, NoPathReason> {
    let radius = bridge_radius
        .unwrap_or_else(|| default_bridge_radius(max_outage_m, feasible.lattice.delta));
    let g = build_outage_graph(feasible, max_outage_m, radius);
    shortest_path(&g, start, goal)
}

/// Plans on `planning` and scores the result on `actual`.
pub fn plan(
    mission: &MissionSpec,
    actual: &SinrMap,
    planning: &SinrMap,
) -> Result<Path, PlanError> {
    mission.validate()?;
    if actual.lattice != planning.lattice {
        return Err(MapError::LatticeMismatch.into());
    }
    let lattice = planning.lattice;
    let start = lattice.snap(mission.start).ok_or(PlanError::OffGrid {
        which: "start",
        point: mission.start.to_array(),
    })?;
    let goal = lattice.snap(mission.goal).ok_or(PlanError::OffGrid {
        which: "goal",
        point: mission.goal.to_array(),
    })?;
    let feasible = build_feasible_map(planning, mission.gamma_t_db);

    let points = match mission.mode {
        PlanMode::Optimal => {
            shortest_path(&build_graph(&feasible), start, goal)
                .map_err(PlanError::NoPath)?
                .points
        }
        PlanMode::Quantized { kappa_xy, kappa_z } => {
            let q = quantize_feasible_map(&feasible, kappa_xy, kappa_z)?;
            let g = build_quantized_graph(&q);
            let route = shortest_path(&g, q.block_of_fine(start), q.block_of_fine(goal))
                .map_err(PlanError::NoPath)?;
            let mut pts = vec![as_point(start)];
            pts.extend(route.points);
            pts.push(as_point(goal));
            pts
        }
        PlanMode::OutageTolerant {
            max_outage_m,
            bridge_radius,
        } => {
            plan_outage_tolerant(&feasible, max_outage_m, bridge_radius, start, goal)
                .map_err(PlanError::NoPath)?
                .points
        }
    };

    let mut path = Path::from_lattice_points(&lattice, &points, mission.speed_mps);
    let report = outage_along(&lattice, &path.waypoints, |idx| {
        actual.sinr_db[idx] < mission.gamma_t_db
    });
    path.outage_m = report.outage_m;
    path.outside_m = report.outside_m;
    Ok(path)
}
