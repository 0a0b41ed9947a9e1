//! Truncated, discretized channel-gain maps, one per GBS.

use rayon::prelude::*;
use thiserror::Error;

use crate::channel::{
    large_scale_gain_db, AntennaModel, ChannelError, ChannelParams, GainOverride,
};
use crate::geometry::{Lattice, Vec3, LATTICE_TOL};
use crate::scene::{Gbs, Region, Scene};

#[derive(Debug, Error)]
pub enum MapError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("map lattices do not coincide")]
    LatticeMismatch,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("loading factor {value} at index {index} is outside [0, 1]")]
    LoadOutOfRange { index: usize, value: f64 },
    #[error("invalid quantization: {0}")]
    Quantization(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("unsupported map format version {0}")]
    Version(u32),
    #[error("malformed map file: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Cell-center lattice covering the region's UAV volume at spacing `delta`.
///
/// Cell `(i, j, k)` sits at `((i + 1/2) delta, (j + 1/2) delta, h_min + (k + 1/2) delta)`.
pub fn region_lattice(region: &Region, delta: f64) -> Result<Lattice, MapError> {
    region
        .validate()
        .map_err(|e| MapError::InvalidGrid(e.to_string()))?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(MapError::InvalidGrid(format!(
            "spacing {delta} must be positive"
        )));
    }
    let count = |len: f64, what: &str| -> Result<usize, MapError> {
        let n = len / delta;
        let r = n.round();
        if r < 1.0 || (n - r).abs() > LATTICE_TOL * n.max(1.0) {
            return Err(MapError::InvalidGrid(format!(
                "{what} {len} m is not a positive multiple of {delta} m"
            )));
        }
        Ok(r as usize)
    };
    let d = count(region.edge_length, "edge length")?;
    let z = count(region.height_range(), "altitude range")?;
    Ok(Lattice::new(
        Vec3::new(delta / 2.0, delta / 2.0, region.h_min + delta / 2.0),
        delta,
        [d, d, z],
    ))
}

/// Stored amplitude gains (dB) of one GBS over the tight bounding box of the
/// cells whose gain reaches `epsilon_db`. Cells inside the box but below the
/// threshold are void and hold `-inf`, which reads back as zero gain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelGainMap {
    pub gbs_id: usize,
    pub lattice: Lattice,
    pub gains_db: Vec<f64>,
    pub epsilon_db: f64,
}

impl ChannelGainMap {
    pub fn is_empty(&self) -> bool {
        self.lattice.is_empty()
    }

    pub fn is_void(&self, flat: usize) -> bool {
        self.gains_db[flat] == f64::NEG_INFINITY
    }

    pub fn non_void_count(&self) -> usize {
        self.gains_db.iter().filter(|g| g.is_finite()).count()
    }

    /// Stored gain in dB for the cell containing `u`, `None` if void or
    /// outside the box.
    pub fn lookup_gain_db(&self, u: Vec3) -> Option<f64> {
        let c = self.lattice.cell_of(u)?;
        let g = self.gains_db[self.lattice.flat(c)];
        g.is_finite().then_some(g)
    }

    /// Linear amplitude gain at `u`; zero outside the effective map.
    pub fn lookup_gain(&self, u: Vec3) -> f64 {
        self.lookup_gain_db(u).map_or(0.0, |g| 10f64.powf(g / 10.0))
    }

    pub fn validate(&self) -> Result<(), MapError> {
        if self.gains_db.len() != self.lattice.len() {
            return Err(MapError::DimensionMismatch(format!(
                "{} gains for dims {:?}",
                self.gains_db.len(),
                self.lattice.dims
            )));
        }
        if self
            .gains_db
            .iter()
            .any(|g| g.is_nan() || *g == f64::INFINITY)
        {
            return Err(MapError::Format(
                "gain values must be finite or void".into(),
            ));
        }
        Ok(())
    }
}

/// Evaluates the GBS's large-scale gain at every point of `lattice`, drops
/// the points below `epsilon_db` and keeps the tight bounding box.
pub fn build_gain_map(
    scene: &Scene,
    params: &ChannelParams,
    antenna: &AntennaModel,
    gbs: &Gbs,
    lattice: &Lattice,
    epsilon_db: f64,
    mode: GainOverride,
) -> Result<ChannelGainMap, MapError> {
    params.validate()?;
    if epsilon_db.is_nan() {
        return Err(MapError::InvalidGrid("threshold is NaN".into()));
    }
    let full: Vec<f64> = (0..lattice.len())
        .into_par_iter()
        .map(|idx| {
            let u = lattice.position(lattice.unflat(idx));
            large_scale_gain_db(scene, params, antenna, gbs, u, mode).map(|g| {
                if g >= epsilon_db {
                    g
                } else {
                    f64::NEG_INFINITY
                }
            })
        })
        .collect::<Result<_, _>>()?;

    let mut lo = [usize::MAX; 3];
    let mut hi = [0usize; 3];
    for (idx, g) in full.iter().enumerate() {
        if g.is_finite() {
            let c = lattice.unflat(idx);
            for a in 0..3 {
                lo[a] = lo[a].min(c[a]);
                hi[a] = hi[a].max(c[a]);
            }
        }
    }
    if lo[0] == usize::MAX {
        return Ok(ChannelGainMap {
            gbs_id: gbs.id,
            lattice: Lattice::new(lattice.origin, lattice.delta, [0, 0, 0]),
            gains_db: Vec::new(),
            epsilon_db,
        });
    }
    let dims = [hi[0] - lo[0] + 1, hi[1] - lo[1] + 1, hi[2] - lo[2] + 1];
    let boxed = Lattice::new(lattice.position(lo), lattice.delta, dims);
    let gains_db = boxed
        .iter_cells()
        .map(|c| full[lattice.flat([c[0] + lo[0], c[1] + lo[1], c[2] + lo[2]])])
        .collect();
    Ok(ChannelGainMap {
        gbs_id: gbs.id,
        lattice: boxed,
        gains_db,
        epsilon_db,
    })
}

/// Builds the maps of every GBS in the scene.
pub fn build_gain_maps(
    scene: &Scene,
    params: &ChannelParams,
    antenna: &AntennaModel,
    lattice: &Lattice,
    epsilon_db: f64,
    mode: GainOverride,
) -> Result<Vec<ChannelGainMap>, MapError> {
    scene
        .gbs
        .iter()
        .map(|g| build_gain_map(scene, params, antenna, g, lattice, epsilon_db, mode))
        .collect()
}
