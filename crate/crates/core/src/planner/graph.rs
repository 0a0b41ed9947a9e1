//! Grid graphs over feasible cells.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{CellIndex, Lattice};
use crate::sinrmap::{FeasibleMap, QuantizedFeasibleMap};

pub(crate) const NO_VERTEX: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphMode {
    /// Every pair of feasible cells within one step in each axis.
    Full26,
    /// Coarse blocks with 8 in-plane neighbors plus straight up and down.
    Quantized10,
    /// Coarse blocks of equal horizontal and vertical ratio, 26 neighbors.
    Quantized26,
    /// `Full26` plus axis-sequential bridges through infeasible cells.
    OutageExtended,
}

/// How an edge is flown between its endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum EdgeRoute {
    Straight,
    /// Along x, then y, then z, starting at the edge's source.
    AxesXyz,
    /// Along z, then y, then x, starting at the edge's source.
    AxesZyx,
}

impl EdgeRoute {
    fn reversed(self) -> Self {
        match self {
            EdgeRoute::Straight => EdgeRoute::Straight,
            EdgeRoute::AxesXyz => EdgeRoute::AxesZyx,
            EdgeRoute::AxesZyx => EdgeRoute::AxesXyz,
        }
    }
}

/// Undirected weighted graph in adjacency-array form.
///
/// Vertices are feasible nodes of a regular node grid (the fine lattice, or
/// the block grid of a quantized map); every node also maps to a point of
/// the fine lattice, which is where it is flown to.
#[derive(Debug, Clone)]
pub struct GridGraph {
    pub mode: GraphMode,
    pub(crate) fine: Lattice,
    pub(crate) node_dims: [usize; 3],
    /// Fine-lattice step per node-grid step on each axis.
    pub(crate) stride: [usize; 3],
    /// Fine-lattice index of node `(0, 0, 0)`.
    pub(crate) base: [usize; 3],
    pub(crate) vertex_of: Vec<u32>,
    pub(crate) nodes: Vec<CellIndex>,
    pub(crate) offsets: Vec<usize>,
    pub(crate) targets: Vec<u32>,
    pub(crate) weights: Vec<f64>,
    pub(crate) routes: Vec<EdgeRoute>,
}

impl GridGraph {
    pub fn vertex_count(&self) -> usize {
        self.nodes.len()
    }

    /// Undirected edge count.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn node_dims(&self) -> [usize; 3] {
        self.node_dims
    }

    pub fn vertex(&self, node: CellIndex) -> Option<u32> {
        if (0..3).any(|a| node[a] >= self.node_dims[a]) {
            return None;
        }
        let v = self.vertex_of[self.node_flat(node)];
        (v != NO_VERTEX).then_some(v)
    }

    pub fn node(&self, v: u32) -> CellIndex {
        self.nodes[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    pub fn neighbors(&self, v: u32) -> impl Iterator<Item = (u32, f64)> + '_ {
        let r = self.offsets[v as usize]..self.offsets[v as usize + 1];
        self.targets[r.clone()]
            .iter()
            .copied()
            .zip(self.weights[r].iter().copied())
    }

    pub(crate) fn edge_entries(&self, v: u32) -> std::ops::Range<usize> {
        self.offsets[v as usize]..self.offsets[v as usize + 1]
    }

    #[inline]
    fn node_flat(&self, c: CellIndex) -> usize {
        (c[2] * self.node_dims[1] + c[1]) * self.node_dims[0] + c[0]
    }

    /// Fine-lattice point a node is flown to.
    pub fn fine_point(&self, node: CellIndex) -> [i64; 3] {
        [
            (self.base[0] + node[0] * self.stride[0]) as i64,
            (self.base[1] + node[1] * self.stride[1]) as i64,
            (self.base[2] + node[2] * self.stride[2]) as i64,
        ]
    }

    pub fn fine_lattice(&self) -> &Lattice {
        &self.fine
    }

    /// Fine-lattice points visited when flying edge `entry` from `from`,
    /// excluding `from` itself.
    pub(crate) fn expand_edge(&self, from: u32, entry: usize) -> Vec<[i64; 3]> {
        let a = self.fine_point(self.node(from));
        let b = self.fine_point(self.node(self.targets[entry]));
        match self.routes[entry] {
            EdgeRoute::Straight => vec![b],
            EdgeRoute::AxesXyz => dedup_points(vec![[b[0], a[1], a[2]], [b[0], b[1], a[2]], b], a),
            EdgeRoute::AxesZyx => dedup_points(vec![[a[0], a[1], b[2]], [a[0], b[1], b[2]], b], a),
        }
    }
}

fn dedup_points(points: Vec<[i64; 3]>, start: [i64; 3]) -> Vec<[i64; 3]> {
    let mut out: Vec<[i64; 3]> = Vec::with_capacity(points.len());
    let mut last = start;
    for p in points {
        if p != last {
            out.push(p);
            last = p;
        }
    }
    out
}

/// Neighbor offsets of the full 3D Moore neighborhood.
pub(crate) fn offsets_26() -> Vec<[i64; 3]> {
    let mut v = Vec::with_capacity(26);
    for dz in -1..=1 {
        for dy in -1..=1 {
            for dx in -1..=1 {
                if (dx, dy, dz) != (0, 0, 0) {
                    v.push([dx, dy, dz]);
                }
            }
        }
    }
    v
}

/// In-plane ring of 8 plus straight up and down.
pub(crate) fn offsets_10() -> Vec<[i64; 3]> {
    let mut v: Vec<[i64; 3]> = offsets_26().into_iter().filter(|o| o[2] == 0).collect();
    v.push([0, 0, -1]);
    v.push([0, 0, 1]);
    v
}

type Adjacency = Vec<(u32, f64, EdgeRoute)>;

struct NodeGrid<'a> {
    dims: [usize; 3],
    feasible: &'a [bool],
}

impl NodeGrid<'_> {
    fn flat(&self, c: CellIndex) -> usize {
        (c[2] * self.dims[1] + c[1]) * self.dims[0] + c[0]
    }
    fn unflat(&self, idx: usize) -> CellIndex {
        let [nx, ny, _] = self.dims;
        [idx % nx, (idx / nx) % ny, idx / (nx * ny)]
    }
}

fn assemble(
    mode: GraphMode,
    fine: Lattice,
    grid: NodeGrid<'_>,
    stride: [usize; 3],
    base: [usize; 3],
    adjacency: impl Fn(&NodeGrid<'_>, &[u32], CellIndex) -> Adjacency + Sync,
) -> GridGraph {
    let mut vertex_of = vec![NO_VERTEX; grid.feasible.len()];
    let mut nodes = Vec::new();
    for (idx, &f) in grid.feasible.iter().enumerate() {
        if f {
            vertex_of[idx] = nodes.len() as u32;
            nodes.push(grid.unflat(idx));
        }
    }
    let lists: Vec<Adjacency> = nodes
        .par_iter()
        .map(|&c| adjacency(&grid, &vertex_of, c))
        .collect();
    let mut offsets = Vec::with_capacity(nodes.len() + 1);
    offsets.push(0);
    let total: usize = lists.iter().map(Vec::len).sum();
    let mut targets = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    let mut routes = Vec::with_capacity(total);
    for list in lists {
        for (t, w, r) in list {
            targets.push(t);
            weights.push(w);
            routes.push(r);
        }
        offsets.push(targets.len());
    }
    GridGraph {
        mode,
        fine,
        node_dims: grid.dims,
        stride,
        base,
        vertex_of,
        nodes,
        offsets,
        targets,
        weights,
        routes,
    }
}

fn step_neighbors(
    grid: &NodeGrid<'_>,
    vertex_of: &[u32],
    c: CellIndex,
    dirs: &[[i64; 3]],
    spacing: [f64; 3],
) -> Adjacency {
    let mut out = Vec::with_capacity(dirs.len());
    for d in dirs {
        let n = [c[0] as i64 + d[0], c[1] as i64 + d[1], c[2] as i64 + d[2]];
        if (0..3).any(|a| n[a] < 0 || n[a] as usize >= grid.dims[a]) {
            continue;
        }
        let nc = [n[0] as usize, n[1] as usize, n[2] as usize];
        let v = vertex_of[grid.flat(nc)];
        if v == NO_VERTEX {
            continue;
        }
        let w = ((d[0] as f64 * spacing[0]).powi(2)
            + (d[1] as f64 * spacing[1]).powi(2)
            + (d[2] as f64 * spacing[2]).powi(2))
        .sqrt();
        out.push((v, w, EdgeRoute::Straight));
    }
    out
}

/// Graph over the feasible cells of `map` with 26-neighbor adjacency.
pub fn build_graph(map: &FeasibleMap) -> GridGraph {
    let dirs = offsets_26();
    let d = map.lattice.delta;
    assemble(
        GraphMode::Full26,
        map.lattice,
        NodeGrid {
            dims: map.lattice.dims,
            feasible: &map.feasible,
        },
        [1, 1, 1],
        [0, 0, 0],
        |g, vo, c| step_neighbors(g, vo, c, &dirs, [d, d, d]),
    )
}

/// Graph over feasible blocks of a quantized map.
///
/// With unequal horizontal and vertical ratios only the 10 moves that stay
/// inside the two blocks are used; with equal ratios blocks are cubes and all
/// 26 moves qualify, which makes ratio (1, 1) identical to [`build_graph`].
pub fn build_quantized_graph(map: &QuantizedFeasibleMap) -> GridGraph {
    let (mode, dirs) = if map.kappa_xy == map.kappa_z {
        (GraphMode::Quantized26, offsets_26())
    } else {
        (GraphMode::Quantized10, offsets_10())
    };
    let d = map.fine.delta;
    let k = map.kappa();
    let spacing = [k[0] as f64 * d, k[1] as f64 * d, k[2] as f64 * d];
    assemble(
        mode,
        map.fine,
        NodeGrid {
            dims: map.dims,
            feasible: &map.feasible,
        },
        k,
        [(k[0] - 1) / 2, (k[1] - 1) / 2, (k[2] - 1) / 2],
        |g, vo, c| step_neighbors(g, vo, c, &dirs, spacing),
    )
}

/// Prefix counts of infeasible cells along each axis line, for O(1) leg
/// outage queries.
struct OutageIndex {
    dims: [usize; 3],
    feasible: Vec<bool>,
    /// `prefix[a][line * (n_a + 1) + t]` = infeasible cells before position
    /// `t` on the given line along axis `a`.
    prefix: [Vec<u32>; 3],
}

impl OutageIndex {
    fn new(map: &FeasibleMap) -> Self {
        let dims = map.lattice.dims;
        let lat = map.lattice;
        let build = |axis: usize| -> Vec<u32> {
            let n = dims[axis];
            let lines = lat.len() / n.max(1);
            let mut out = vec![0u32; lines * (n + 1)];
            for line in 0..lines {
                let mut acc = 0;
                for t in 0..n {
                    let c = Self::line_cell(dims, axis, line, t);
                    if !map.feasible[lat.flat(c)] {
                        acc += 1;
                    }
                    out[line * (n + 1) + t + 1] = acc;
                }
            }
            out
        };
        Self {
            dims,
            feasible: map.feasible.clone(),
            prefix: [build(0), build(1), build(2)],
        }
    }

    /// Cell at position `t` of line `line` along `axis`; lines enumerate the
    /// other two coordinates with the lower axis fastest.
    fn line_cell(dims: [usize; 3], axis: usize, line: usize, t: usize) -> CellIndex {
        let (a1, a2) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let mut c = [0; 3];
        c[axis] = t;
        c[a1] = line % dims[a1];
        c[a2] = line / dims[a1];
        c
    }

    fn line_of(&self, axis: usize, c: CellIndex) -> usize {
        let (a1, a2) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        c[a2] * self.dims[a1] + c[a1]
    }

    fn bad(&self, c: CellIndex) -> u32 {
        let f = self.feasible[(c[2] * self.dims[1] + c[1]) * self.dims[0] + c[0]];
        u32::from(!f)
    }

    /// In-outage length of an axis leg, in half-cell units.
    fn leg(&self, axis: usize, from: CellIndex, to_coord: usize) -> u32 {
        let s = from[axis];
        if s == to_coord {
            return 0;
        }
        let (lo, hi) = (s.min(to_coord), s.max(to_coord));
        let n = self.dims[axis];
        let line = self.line_of(axis, from);
        let p = &self.prefix[axis];
        let interior = p[line * (n + 1) + hi] - p[line * (n + 1) + lo + 1];
        let mut end = from;
        end[axis] = to_coord;
        2 * interior + self.bad(from) + self.bad(end)
    }

    /// Half-cell outage of the connector that moves along `order` axes in
    /// sequence.
    fn connector(&self, a: CellIndex, b: CellIndex, order: [usize; 3]) -> u32 {
        let mut cur = a;
        let mut total = 0;
        for axis in order {
            total += self.leg(axis, cur, b[axis]);
            cur[axis] = b[axis];
        }
        total
    }
}

/// Default Chebyshev reach of bridge candidates for tolerance `max_outage`.
pub fn default_bridge_radius(max_outage: f64, delta: f64) -> usize {
    (max_outage / delta).ceil().max(0.0) as usize + 2
}

/// [`build_graph`] plus bridge edges between feasible cells whose
/// axis-sequential connector spends at most `max_outage` meters in
/// infeasible cells.
///
/// For an unordered pair the x-y-z connector from either end is considered;
/// the one with less outage is kept. Connectors with zero outage are skipped:
/// the 26-neighbor edges already realize them at the same length.
pub fn build_outage_graph(map: &FeasibleMap, max_outage: f64, radius: usize) -> GridGraph {
    let dirs = offsets_26();
    let delta = map.lattice.delta;
    let index = OutageIndex::new(map);
    let limit_half = (2.0 * max_outage / delta + 1e-9).floor();
    let r = radius as i64;
    assemble(
        GraphMode::OutageExtended,
        map.lattice,
        NodeGrid {
            dims: map.lattice.dims,
            feasible: &map.feasible,
        },
        [1, 1, 1],
        [0, 0, 0],
        |g, vo, c| {
            let mut out = step_neighbors(g, vo, c, &dirs, [delta; 3]);
            if limit_half < 1.0 {
                return out;
            }
            let lo = |a: usize| (c[a] as i64 - r).max(0);
            let hi = |a: usize| (c[a] as i64 + r).min(g.dims[a] as i64 - 1);
            for z in lo(2)..=hi(2) {
                for y in lo(1)..=hi(1) {
                    for x in lo(0)..=hi(0) {
                        let dx = (x - c[0] as i64).abs();
                        let dy = (y - c[1] as i64).abs();
                        let dz = (z - c[2] as i64).abs();
                        if dx.max(dy).max(dz) < 2 {
                            continue;
                        }
                        let b = [x as usize, y as usize, z as usize];
                        let v = vo[g.flat(b)];
                        if v == NO_VERTEX {
                            continue;
                        }
                        // Decide once per unordered pair from the lower
                        // flat index so both directions agree.
                        let (lo_c, hi_c, flipped) = if g.flat(c) < g.flat(b) {
                            (c, b, false)
                        } else {
                            (b, c, true)
                        };
                        let xyz = index.connector(lo_c, hi_c, [0, 1, 2]);
                        let zyx = index.connector(lo_c, hi_c, [2, 1, 0]);
                        let best = xyz.min(zyx);
                        if best == 0 || best as f64 > limit_half {
                            continue;
                        }
                        let route_from_lo = if xyz <= zyx {
                            EdgeRoute::AxesXyz
                        } else {
                            EdgeRoute::AxesZyx
                        };
                        let route = if flipped {
                            route_from_lo.reversed()
                        } else {
                            route_from_lo
                        };
                        out.push((v, (dx + dy + dz) as f64 * delta, route));
                    }
                }
            }
            out
        },
    )
}
