#![allow(dead_code)]

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skyroute::channel::AntennaModel;
use skyroute::planner::build_basis_sinr_map;
use skyroute::{
    generate_scene, region_lattice, ChannelParams, FeasibleMap, Lattice, PlanningBasis, Scene,
    SceneConfig, SinrMap, Vec3,
};

pub const DELTA: f64 = 10.0;

pub fn fixture_lattice(dims: [usize; 3]) -> Lattice {
    Lattice::new(Vec3::new(5.0, 5.0, 95.0), DELTA, dims)
}

/// Random boolean grid with each cell infeasible with probability `p_bad`.
pub fn random_feasible(dims: [usize; 3], p_bad: f64, seed: u64) -> FeasibleMap {
    let lat = fixture_lattice(dims);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let flags = (0..lat.len()).map(|_| !rng.random_bool(p_bad)).collect();
    FeasibleMap::from_cells(lat, flags).unwrap()
}

/// Shortest 26-neighbor route length by exhaustive label correction.
///
/// Lengths are tracked as integer counts of axis, face-diagonal and
/// body-diagonal steps; the result is rebuilt from those counts so it can be
/// compared bit-for-bit with the planner.
pub fn oracle_length(map: &FeasibleMap, s: [usize; 3], g: [usize; 3]) -> Option<f64> {
    let lat = map.lattice;
    let ok = |c: [i64; 3]| lat.contains_index(c) && map.feasible[lat.flat(to_u(c))];
    if !ok(to_i(s)) || !ok(to_i(g)) {
        return None;
    }
    let value = |n: [u64; 3]| n[0] as f64 + n[1] as f64 * 2f64.sqrt() + n[2] as f64 * 3f64.sqrt();
    let mut best: Vec<Option<[u64; 3]>> = vec![None; lat.len()];
    best[lat.flat(s)] = Some([0, 0, 0]);
    let mut queue = VecDeque::from([s]);
    while let Some(c) = queue.pop_front() {
        let here = best[lat.flat(c)].unwrap();
        for dz in -1i64..=1 {
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let kind = (dx.abs() + dy.abs() + dz.abs()) as usize;
                    if kind == 0 {
                        continue;
                    }
                    let n = [c[0] as i64 + dx, c[1] as i64 + dy, c[2] as i64 + dz];
                    if !ok(n) {
                        continue;
                    }
                    let mut cand = here;
                    cand[kind - 1] += 1;
                    let slot = &mut best[lat.flat(to_u(n))];
                    if slot.is_none_or(|old| value(cand) < value(old) - 1e-9) {
                        *slot = Some(cand);
                        queue.push_back(to_u(n));
                    }
                }
            }
        }
    }
    best[lat.flat(g)].map(|n| canonical(n, lat.delta))
}

/// Length from step counts, summed by radical in increasing order.
pub fn canonical(n: [u64; 3], delta: f64) -> f64 {
    let mut total = 0.0;
    for (b, count) in [(1.0f64, n[0]), (2.0, n[1]), (3.0, n[2])] {
        if count > 0 {
            total += count as f64 * b.sqrt() * delta;
        }
    }
    total
}

pub fn to_i(c: [usize; 3]) -> [i64; 3] {
    [c[0] as i64, c[1] as i64, c[2] as i64]
}

pub fn to_u(c: [i64; 3]) -> [usize; 3] {
    [c[0] as usize, c[1] as usize, c[2] as usize]
}

/// Flood fill over feasible 26-neighbors.
pub fn flood_connected(map: &FeasibleMap, s: [usize; 3], g: [usize; 3]) -> bool {
    oracle_length(map, s, g).is_some()
}

pub struct SceneMaps {
    pub scene: Scene,
    pub actual: SinrMap,
}

pub fn reference_params() -> ChannelParams {
    ChannelParams::reference()
}

pub fn reference_scene(seed: u64) -> Scene {
    generate_scene(&SceneConfig::reference(), seed).unwrap()
}

pub fn basis_map(scene: &Scene, antenna: &AntennaModel, basis: PlanningBasis) -> SinrMap {
    let params = reference_params();
    let lat = region_lattice(&scene.region, DELTA).unwrap();
    build_basis_sinr_map(
        scene,
        &params,
        antenna,
        &lat,
        params.noise_floor_gain_db(),
        basis,
    )
    .unwrap()
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

pub const START: [f64; 3] = [5.0, 5.0, 95.0];
pub const GOAL: [f64; 3] = [625.0, 625.0, 125.0];
