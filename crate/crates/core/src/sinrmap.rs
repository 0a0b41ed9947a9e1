//! Expected-SINR map with optimal GBS association, and the feasibility maps
//! derived from it.

use rayon::prelude::*;

use crate::channel::{linear_to_db, ChannelParams};
use crate::gainmap::{ChannelGainMap, MapError};
use crate::geometry::{CellIndex, Lattice, Vec3};

/// Expected SINR (dB) and serving GBS id per cell of the planning lattice.
/// Cells that see no GBS hold `-inf` and no association.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrMap {
    pub lattice: Lattice,
    pub sinr_db: Vec<f64>,
    pub assoc: Vec<Option<u32>>,
}

/// Best candidate ratio over all GBSs for one location.
///
/// `power_gains` are linear power gains `h^2`. Each candidate's interference
/// is the load-weighted sum over the other GBSs, taken from prefix and suffix
/// sums so no term is ever subtracted. Ties go to the lowest index.
pub fn best_candidate(
    power_gains: &[f64],
    loads: &[f64],
    tx_mw: f64,
    noise_mw: f64,
) -> (f64, Option<usize>) {
    let n = power_gains.len();
    let mut suffix = vec![0.0; n + 1];
    for m in (0..n).rev() {
        suffix[m] = suffix[m + 1] + loads[m] * power_gains[m];
    }
    let mut prefix = 0.0;
    let mut best = 0.0;
    let mut arg = None;
    for m in 0..n {
        let h2 = power_gains[m];
        if h2 > 0.0 {
            let ratio = tx_mw * h2 / (noise_mw + tx_mw * (prefix + suffix[m + 1]));
            if arg.is_none() || ratio > best {
                best = ratio;
                arg = Some(m);
            }
        }
        prefix += loads[m] * h2;
    }
    (best, arg)
}

fn check_loads(loads: &[f64]) -> Result<(), MapError> {
    for (index, &value) in loads.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(MapError::LoadOutOfRange { index, value });
        }
    }
    Ok(())
}

/// Combines per-GBS gain maps and loading factors into the SINR map over
/// `lattice`. Work is `O(cells * M)`.
pub fn build_sinr_map(
    gain_maps: &[ChannelGainMap],
    loads: &[f64],
    params: &ChannelParams,
    lattice: &Lattice,
) -> Result<SinrMap, MapError> {
    params.validate()?;
    if gain_maps.len() != loads.len() {
        return Err(MapError::DimensionMismatch(format!(
            "{} gain maps but {} loading factors",
            gain_maps.len(),
            loads.len()
        )));
    }
    check_loads(loads)?;
    let mut offsets = Vec::with_capacity(gain_maps.len());
    for map in gain_maps {
        map.validate()?;
        if map.is_empty() {
            offsets.push(None);
            continue;
        }
        let off = lattice
            .offset_of(&map.lattice)
            .ok_or(MapError::LatticeMismatch)?;
        offsets.push(Some(off));
    }
    let tx = params.tx_power_mw();
    let noise = params.noise_power_mw();

    let cells: Vec<(f64, Option<u32>)> = (0..lattice.len())
        .into_par_iter()
        .map_init(
            || vec![0.0; gain_maps.len()],
            |h2, idx| {
                let c = lattice.unflat(idx);
                for (slot, (map, off)) in h2.iter_mut().zip(gain_maps.iter().zip(&offsets)) {
                    *slot = off
                        .and_then(|o| {
                            let local =
                                [c[0] as i64 - o[0], c[1] as i64 - o[1], c[2] as i64 - o[2]];
                            map.lattice.contains_index(local).then(|| {
                                map.gains_db[map.lattice.flat([
                                    local[0] as usize,
                                    local[1] as usize,
                                    local[2] as usize,
                                ])]
                            })
                        })
                        .map_or(0.0, |g_db| 10f64.powf(g_db / 5.0));
                }
                let (ratio, arg) = best_candidate(h2, loads, tx, noise);
                let id = arg.map(|m| gain_maps[m].gbs_id as u32);
                let db = if arg.is_some() {
                    linear_to_db(ratio)
                } else {
                    f64::NEG_INFINITY
                };
                (db, id)
            },
        )
        .collect();
    let (sinr_db, assoc) = cells.into_iter().unzip();
    Ok(SinrMap {
        lattice: *lattice,
        sinr_db,
        assoc,
    })
}

impl SinrMap {
    pub fn at(&self, c: CellIndex) -> f64 {
        self.sinr_db[self.lattice.flat(c)]
    }

    pub fn value_at(&self, u: Vec3) -> Option<f64> {
        self.lattice.cell_of(u).map(|c| self.at(c))
    }

    /// Smallest finite entry.
    pub fn min_finite_db(&self) -> Option<f64> {
        self.sinr_db
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .reduce(f64::min)
    }

    pub fn max_db(&self) -> Option<f64> {
        self.sinr_db
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .reduce(f64::max)
    }

    pub fn feasible_count(&self, gamma_t_db: f64) -> usize {
        self.sinr_db.iter().filter(|&&v| v >= gamma_t_db).count()
    }

    pub fn validate(&self) -> Result<(), MapError> {
        let n = self.lattice.len();
        if self.sinr_db.len() != n || self.assoc.len() != n {
            return Err(MapError::DimensionMismatch(format!(
                "{} SINR / {} association entries for {} cells",
                self.sinr_db.len(),
                self.assoc.len(),
                n
            )));
        }
        Ok(())
    }
}

/// Cells whose expected SINR reaches the target.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleMap {
    pub lattice: Lattice,
    pub feasible: Vec<bool>,
    pub gamma_t_db: f64,
}

pub fn build_feasible_map(sinr: &SinrMap, gamma_t_db: f64) -> FeasibleMap {
    FeasibleMap {
        lattice: sinr.lattice,
        feasible: sinr.sinr_db.iter().map(|&v| v >= gamma_t_db).collect(),
        gamma_t_db,
    }
}

impl FeasibleMap {
    /// Wraps an explicit boolean grid, mainly for fixtures.
    pub fn from_cells(lattice: Lattice, feasible: Vec<bool>) -> Result<Self, MapError> {
        if feasible.len() != lattice.len() {
            return Err(MapError::DimensionMismatch(format!(
                "{} flags for {} cells",
                feasible.len(),
                lattice.len()
            )));
        }
        Ok(Self {
            lattice,
            feasible,
            gamma_t_db: f64::NAN,
        })
    }

    #[inline]
    pub fn is_feasible(&self, c: CellIndex) -> bool {
        self.feasible[self.lattice.flat(c)]
    }

    pub fn count(&self) -> usize {
        self.feasible.iter().filter(|&&f| f).count()
    }
}

/// Coarse feasibility over blocks of `kappa_xy x kappa_xy x kappa_z` cells.
///
/// Block `(i, j, k)` covers fine cells `i*kappa_xy .. (i+1)*kappa_xy` (and so
/// on per axis) and is centered on the fine point
/// `(i*kappa_xy + (kappa_xy-1)/2, ...)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedFeasibleMap {
    pub fine: Lattice,
    pub kappa_xy: usize,
    pub kappa_z: usize,
    pub dims: [usize; 3],
    pub feasible: Vec<bool>,
    pub gamma_t_db: f64,
}

pub fn quantize_feasible_map(
    map: &FeasibleMap,
    kappa_xy: usize,
    kappa_z: usize,
) -> Result<QuantizedFeasibleMap, MapError> {
    if kappa_xy == 0 || kappa_z == 0 {
        return Err(MapError::Quantization("ratios must be positive".into()));
    }
    if kappa_xy.is_multiple_of(2) || kappa_z.is_multiple_of(2) {
        return Err(MapError::Quantization(format!(
            "ratios must be odd, got ({kappa_xy}, {kappa_z})"
        )));
    }
    if kappa_xy < kappa_z {
        return Err(MapError::Quantization(format!(
            "horizontal ratio {kappa_xy} is below vertical ratio {kappa_z}"
        )));
    }
    let [nx, ny, nz] = map.lattice.dims;
    if nx % kappa_xy != 0 || ny % kappa_xy != 0 || nz % kappa_z != 0 {
        return Err(MapError::Quantization(format!(
            "dims {:?} not divisible by ({kappa_xy}, {kappa_xy}, {kappa_z})",
            map.lattice.dims
        )));
    }
    let dims = [nx / kappa_xy, ny / kappa_xy, nz / kappa_z];
    let mut feasible = vec![true; dims[0] * dims[1] * dims[2]];
    for (idx, &f) in map.feasible.iter().enumerate() {
        if !f {
            let c = map.lattice.unflat(idx);
            let q = [c[0] / kappa_xy, c[1] / kappa_xy, c[2] / kappa_z];
            feasible[(q[2] * dims[1] + q[1]) * dims[0] + q[0]] = false;
        }
    }
    Ok(QuantizedFeasibleMap {
        fine: map.lattice,
        kappa_xy,
        kappa_z,
        dims,
        feasible,
        gamma_t_db: map.gamma_t_db,
    })
}

impl QuantizedFeasibleMap {
    pub fn len(&self) -> usize {
        self.feasible.len()
    }

    pub fn is_empty(&self) -> bool {
        self.feasible.is_empty()
    }

    #[inline]
    pub fn flat(&self, c: CellIndex) -> usize {
        (c[2] * self.dims[1] + c[1]) * self.dims[0] + c[0]
    }

    #[inline]
    pub fn unflat(&self, idx: usize) -> CellIndex {
        let [nx, ny, _] = self.dims;
        [idx % nx, (idx / nx) % ny, idx / (nx * ny)]
    }

    pub fn is_feasible(&self, c: CellIndex) -> bool {
        self.feasible[self.flat(c)]
    }

    pub fn kappa(&self) -> [usize; 3] {
        [self.kappa_xy, self.kappa_xy, self.kappa_z]
    }

    /// Fine-lattice index of a block's center point.
    pub fn center_fine_index(&self, c: CellIndex) -> CellIndex {
        let k = self.kappa();
        [
            c[0] * k[0] + (k[0] - 1) / 2,
            c[1] * k[1] + (k[1] - 1) / 2,
            c[2] * k[2] + (k[2] - 1) / 2,
        ]
    }

    pub fn center(&self, c: CellIndex) -> Vec3 {
        self.fine.position(self.center_fine_index(c))
    }

    /// Block containing a fine cell.
    pub fn block_of_fine(&self, fine: CellIndex) -> CellIndex {
        let k = self.kappa();
        [fine[0] / k[0], fine[1] / k[1], fine[2] / k[2]]
    }

    /// Fine cells covered by block `c`.
    pub fn neighborhood(&self, c: CellIndex) -> impl Iterator<Item = CellIndex> {
        let k = self.kappa();
        let base = [c[0] * k[0], c[1] * k[1], c[2] * k[2]];
        (0..k[2]).flat_map(move |dz| {
            (0..k[1]).flat_map(move |dy| {
                (0..k[0]).map(move |dx| [base[0] + dx, base[1] + dy, base[2] + dz])
            })
        })
    }
}
