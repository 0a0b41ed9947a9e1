//! Region, ground base stations, cuboid obstacles and line-of-sight queries.
//!
//! Scenes are generated from a [`SceneConfig`] and a 64-bit seed with the
//! `ChaCha8` stream generator (`rand_chacha`, seeded through
//! `SeedableRng::seed_from_u64`). Uniform variates are 53-bit floats in
//! `[0, 1)`. Draw order is fixed: GBS positions `(x, y)` in id order, then
//! loading factors when they are random, then for each obstacle
//! `(cx, cy, side, height...)`. Heights are Rayleigh with scale
//! `mean * sqrt(2 / pi)` drawn by inverse CDF and redrawn until they do not
//! exceed the minimum UAV altitude.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Aabb, Vec3};

pub const SCENE_FORMAT_VERSION: u32 = 1;

/// Redraw budget for a truncated obstacle height before clamping.
const MAX_HEIGHT_DRAWS: usize = 10_000;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("scene needs at least one GBS")]
    NoGbs,
    #[error("loading factor {value} of GBS {id} is outside [0, 1]")]
    LoadOutOfRange { id: usize, value: f64 },
    #[error("expected {expected} loading factors, got {got}")]
    LoadCount { expected: usize, got: usize },
    #[error("invalid obstacle configuration: {0}")]
    InvalidObstacles(String),
    #[error("unsupported scene file version {0}")]
    Version(u32),
    #[error("malformed scene: {0}")]
    Malformed(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Square horizontal area of edge `edge_length`, UAV altitude band
/// `[h_min, h_max]` and common GBS antenna height `h_gbs`. All in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    #[serde(rename = "L")]
    pub edge_length: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub h_gbs: f64,
}

impl Region {
    pub fn validate(&self) -> Result<(), SceneError> {
        let vals = [self.edge_length, self.h_min, self.h_max, self.h_gbs];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(SceneError::InvalidRegion("non-finite value".into()));
        }
        if self.edge_length <= 0.0 {
            return Err(SceneError::InvalidRegion(format!(
                "edge length {} must be positive",
                self.edge_length
            )));
        }
        if !(0.0 < self.h_gbs && self.h_gbs < self.h_min && self.h_min < self.h_max) {
            return Err(SceneError::InvalidRegion(format!(
                "need 0 < h_gbs ({}) < h_min ({}) < h_max ({})",
                self.h_gbs, self.h_min, self.h_max
            )));
        }
        Ok(())
    }

    pub fn height_range(&self) -> f64 {
        self.h_max - self.h_min
    }

    pub fn contains_horizontal(&self, x: f64, y: f64) -> bool {
        (0.0..=self.edge_length).contains(&x) && (0.0..=self.edge_length).contains(&y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gbs {
    /// One-based identifier.
    pub id: usize,
    pub position: Vec3,
    pub loading_factor: f64,
}

/// Cuboid standing on the ground.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    #[serde(rename = "cx")]
    pub center_x: f64,
    #[serde(rename = "cy")]
    pub center_y: f64,
    #[serde(rename = "hx")]
    pub half_width_x: f64,
    #[serde(rename = "hy")]
    pub half_width_y: f64,
    #[serde(rename = "h")]
    pub height: f64,
}

impl Obstacle {
    pub fn bounds(&self) -> Aabb {
        Aabb::new(
            Vec3::new(
                self.center_x - self.half_width_x,
                self.center_y - self.half_width_y,
                0.0,
            ),
            Vec3::new(
                self.center_x + self.half_width_x,
                self.center_y + self.half_width_y,
                self.height,
            ),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadMode {
    Explicit(Vec<f64>),
    UniformRandom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneConfig {
    pub n_gbs: usize,
    pub n_obstacles: usize,
    pub region: Region,
    /// Range of the (equal) obstacle length and width, meters.
    pub obstacle_size_range: (f64, f64),
    pub obstacle_height_mean: f64,
    pub load_mode: LoadMode,
}

/// The averaged loading factors used throughout the reference setup.
pub const REFERENCE_LOADS: [f64; 6] = [0.0318, 0.6561, 0.3223, 0.9679, 0.2598, 0.7672];

impl SceneConfig {
    /// 630 m square, UAV band 90-130 m, six 10 m-high GBSs, thirty obstacles
    /// with sides in [50, 70] m and Rayleigh heights of mean 30 m.
    pub fn reference() -> Self {
        Self {
            n_gbs: 6,
            n_obstacles: 30,
            region: Region {
                edge_length: 630.0,
                h_min: 90.0,
                h_max: 130.0,
                h_gbs: 10.0,
            },
            obstacle_size_range: (50.0, 70.0),
            obstacle_height_mean: 30.0,
            load_mode: LoadMode::Explicit(REFERENCE_LOADS.to_vec()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub region: Region,
    pub gbs: Vec<Gbs>,
    pub obstacles: Vec<Obstacle>,
    pub seed: u64,
}

pub fn generate_scene(config: &SceneConfig, seed: u64) -> Result<Scene, SceneError> {
    let region = config.region;
    region.validate()?;
    if config.n_gbs == 0 {
        return Err(SceneError::NoGbs);
    }
    let (size_lo, size_hi) = config.obstacle_size_range;
    if config.n_obstacles > 0 {
        if !(size_lo > 0.0 && size_lo <= size_hi && size_hi.is_finite()) {
            return Err(SceneError::InvalidObstacles(format!(
                "size range [{size_lo}, {size_hi}]"
            )));
        }
        if !(config.obstacle_height_mean > 0.0 && config.obstacle_height_mean.is_finite()) {
            return Err(SceneError::InvalidObstacles(format!(
                "height mean {}",
                config.obstacle_height_mean
            )));
        }
    }
    if let LoadMode::Explicit(loads) = &config.load_mode {
        if loads.len() != config.n_gbs {
            return Err(SceneError::LoadCount {
                expected: config.n_gbs,
                got: loads.len(),
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = region.edge_length;
    let mut gbs: Vec<Gbs> = (1..=config.n_gbs)
        .map(|id| {
            let x = rng.random::<f64>() * l;
            let y = rng.random::<f64>() * l;
            Gbs {
                id,
                position: Vec3::new(x, y, region.h_gbs),
                loading_factor: 0.0,
            }
        })
        .collect();
    match &config.load_mode {
        LoadMode::Explicit(loads) => {
            for (g, &load) in gbs.iter_mut().zip(loads) {
                g.loading_factor = load;
            }
        }
        LoadMode::UniformRandom => {
            for g in gbs.iter_mut() {
                g.loading_factor = rng.random::<f64>();
            }
        }
    }

    let rayleigh_scale = config.obstacle_height_mean * (2.0 / std::f64::consts::PI).sqrt();
    let obstacles = (0..config.n_obstacles)
        .map(|_| {
            let cx = rng.random::<f64>() * l;
            let cy = rng.random::<f64>() * l;
            let side = size_lo + rng.random::<f64>() * (size_hi - size_lo);
            let mut height = f64::INFINITY;
            for _ in 0..MAX_HEIGHT_DRAWS {
                let u: f64 = rng.random();
                height = rayleigh_scale * (-2.0 * (1.0 - u).ln()).sqrt();
                if height <= region.h_min {
                    break;
                }
            }
            Obstacle {
                center_x: cx,
                center_y: cy,
                half_width_x: side / 2.0,
                half_width_y: side / 2.0,
                height: height.min(region.h_min),
            }
        })
        .collect();

    let scene = Scene {
        region,
        gbs,
        obstacles,
        seed,
    };
    scene.validate()?;
    Ok(scene)
}

impl Scene {
    pub fn validate(&self) -> Result<(), SceneError> {
        self.region.validate()?;
        if self.gbs.is_empty() {
            return Err(SceneError::NoGbs);
        }
        for (n, g) in self.gbs.iter().enumerate() {
            if g.id != n + 1 {
                return Err(SceneError::Malformed(format!(
                    "GBS ids must be 1..M in order, found {} at position {}",
                    g.id,
                    n + 1
                )));
            }
            if !(0.0..=1.0).contains(&g.loading_factor) {
                return Err(SceneError::LoadOutOfRange {
                    id: g.id,
                    value: g.loading_factor,
                });
            }
            if !self.region.contains_horizontal(g.position.x, g.position.y) {
                return Err(SceneError::Malformed(format!(
                    "GBS {} lies outside the horizontal region",
                    g.id
                )));
            }
        }
        for o in &self.obstacles {
            if !(o.half_width_x > 0.0 && o.half_width_y > 0.0) {
                return Err(SceneError::InvalidObstacles(
                    "half-widths must be positive".into(),
                ));
            }
            if !(o.height >= 0.0 && o.height <= self.region.h_min) {
                return Err(SceneError::InvalidObstacles(format!(
                    "obstacle height {} outside [0, h_min]",
                    o.height
                )));
            }
        }
        Ok(())
    }

    pub fn loads(&self) -> Vec<f64> {
        self.gbs.iter().map(|g| g.loading_factor).collect()
    }

    pub fn gbs_by_id(&self, id: usize) -> Option<&Gbs> {
        id.checked_sub(1).and_then(|i| self.gbs.get(i))
    }

    /// True when the closed segment between the GBS and `uav` touches no
    /// obstacle.
    pub fn is_los(&self, gbs: &Gbs, uav: Vec3) -> bool {
        los_between(&self.obstacles, gbs.position, uav)
    }

    pub fn to_json(&self) -> Result<String, SceneError> {
        Ok(serde_json::to_string_pretty(&SceneFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self, SceneError> {
        let file: SceneFile = serde_json::from_str(text)?;
        if file.version != SCENE_FORMAT_VERSION {
            return Err(SceneError::Version(file.version));
        }
        let region = file.region;
        let scene = Scene {
            region,
            gbs: file
                .gbs
                .iter()
                .map(|g| Gbs {
                    id: g.id,
                    position: Vec3::new(g.x, g.y, region.h_gbs),
                    loading_factor: g.load,
                })
                .collect(),
            obstacles: file.obstacles,
            seed: file.seed,
        };
        scene.validate()?;
        Ok(scene)
    }
}

pub fn los_between(obstacles: &[Obstacle], a: Vec3, b: Vec3) -> bool {
    !obstacles
        .iter()
        .any(|o| o.bounds().intersects_segment(a, b))
}

#[derive(Serialize, Deserialize)]
struct GbsRecord {
    id: usize,
    x: f64,
    y: f64,
    load: f64,
}

#[derive(Serialize, Deserialize)]
struct SceneFile {
    version: u32,
    seed: u64,
    region: Region,
    gbs: Vec<GbsRecord>,
    obstacles: Vec<Obstacle>,
}

impl From<&Scene> for SceneFile {
    fn from(s: &Scene) -> Self {
        SceneFile {
            version: SCENE_FORMAT_VERSION,
            seed: s.seed,
            region: s.region,
            gbs: s
                .gbs
                .iter()
                .map(|g| GbsRecord {
                    id: g.id,
                    x: g.position.x,
                    y: g.position.y,
                    load: g.loading_factor,
                })
                .collect(),
            obstacles: s.obstacles.clone(),
        }
    }
}
