//! Breadth-first connectivity and Dijkstra over [`GridGraph`].

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use super::graph::GridGraph;
use crate::geometry::{lattice_polyline_length, CellIndex};

/// Vertex sequence of a shortest path plus its fine-lattice polyline.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub vertices: Vec<u32>,
    /// Fine-lattice points flown, bridge corners included.
    pub points: Vec<[i64; 3]>,
    pub length_m: f64,
}

/// Why a search found nothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct NoPathReason {
    pub start_feasible: bool,
    pub goal_feasible: bool,
    pub connected: bool,
}

/// True iff both nodes are vertices of `graph` and lie in one component.
pub fn check_feasibility(graph: &GridGraph, start: CellIndex, goal: CellIndex) -> bool {
    let (Some(s), Some(g)) = (graph.vertex(start), graph.vertex(goal)) else {
        return false;
    };
    if s == g {
        return true;
    }
    let mut seen = vec![false; graph.vertex_count()];
    let mut queue = VecDeque::from([s]);
    seen[s as usize] = true;
    while let Some(v) = queue.pop_front() {
        for (w, _) in graph.neighbors(v) {
            if w == g {
                return true;
            }
            if !seen[w as usize] {
                seen[w as usize] = true;
                queue.push_back(w);
            }
        }
    }
    false
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    v: u32,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.v.cmp(&self.v))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Minimum-weight route between two nodes.
///
/// Among predecessors reaching a vertex at exactly the same distance the one
/// with the smaller vertex index wins, so results are reproducible.
pub fn shortest_path(
    graph: &GridGraph,
    start: CellIndex,
    goal: CellIndex,
) -> Result<Route, NoPathReason> {
    let s = graph.vertex(start);
    let g = graph.vertex(goal);
    let (Some(s), Some(g)) = (s, g) else {
        return Err(NoPathReason {
            start_feasible: s.is_some(),
            goal_feasible: g.is_some(),
            connected: false,
        });
    };
    let n = graph.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    // (predecessor vertex, edge entry used)
    let mut pred: Vec<Option<(u32, usize)>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[s as usize] = 0.0;
    heap.push(Entry { dist: 0.0, v: s });
    while let Some(Entry { dist: d, v }) = heap.pop() {
        if done[v as usize] {
            continue;
        }
        done[v as usize] = true;
        if v == g {
            break;
        }
        for e in graph.edge_entries(v) {
            let w = graph.targets[e];
            if done[w as usize] {
                continue;
            }
            let nd = d + graph.weights[e];
            let cur = dist[w as usize];
            let better = nd < cur || (nd == cur && pred[w as usize].is_some_and(|(p, _)| v < p));
            if better {
                dist[w as usize] = nd;
                pred[w as usize] = Some((v, e));
                heap.push(Entry { dist: nd, v: w });
            }
        }
    }
    if !done[g as usize] {
        return Err(NoPathReason {
            start_feasible: true,
            goal_feasible: true,
            connected: false,
        });
    }

    let mut hops = Vec::new();
    let mut cur = g;
    while let Some((p, e)) = pred[cur as usize] {
        hops.push((p, e));
        cur = p;
    }
    hops.reverse();
    let mut vertices = vec![s];
    let mut points = vec![graph.fine_point(graph.node(s))];
    for (p, e) in hops {
        points.extend(graph.expand_edge(p, e));
        vertices.push(graph.targets[e]);
    }
    let length_m = lattice_polyline_length(&points, graph.fine.delta);
    Ok(Route {
        vertices,
        points,
        length_m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Lattice, Vec3};
    use crate::planner::graph::{build_graph, build_outage_graph};
    use crate::sinrmap::FeasibleMap;

    fn grid(dims: [usize; 3], bad: &[CellIndex]) -> FeasibleMap {
        let lat = Lattice::new(Vec3::new(5.0, 5.0, 95.0), 10.0, dims);
        let mut f = vec![true; lat.len()];
        for &c in bad {
            f[lat.flat(c)] = false;
        }
        FeasibleMap::from_cells(lat, f).unwrap()
    }

    #[test]
    fn diagonal_corner_to_corner() {
        let g = build_graph(&grid([3, 3, 1], &[]));
        let r = shortest_path(&g, [0, 0, 0], [2, 2, 0]).unwrap();
        assert!((r.length_m - 20.0 * 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.vertices.len(), 3);
    }

    #[test]
    fn detour_around_blocked_centre() {
        let g = build_graph(&grid([3, 3, 1], &[[1, 1, 0]]));
        let r = shortest_path(&g, [0, 0, 0], [2, 2, 0]).unwrap();
        assert!((r.length_m - (20.0 + 10.0 * 2f64.sqrt())).abs() < 1e-12);
        assert!((r.length_m - 34.1421).abs() < 1e-4);
    }

    #[test]
    fn start_equals_goal() {
        let g = build_graph(&grid([2, 2, 1], &[]));
        let r = shortest_path(&g, [1, 0, 0], [1, 0, 0]).unwrap();
        assert_eq!(r.length_m, 0.0);
        assert_eq!(r.points.len(), 1);
        assert!(check_feasibility(&g, [1, 0, 0], [1, 0, 0]));
    }

    #[test]
    fn infeasible_endpoint_reported() {
        let g = build_graph(&grid([3, 1, 1], &[[0, 0, 0]]));
        assert!(!check_feasibility(&g, [0, 0, 0], [2, 0, 0]));
        let e = shortest_path(&g, [0, 0, 0], [2, 0, 0]).unwrap_err();
        assert!(!e.start_feasible && e.goal_feasible && !e.connected);
    }

    #[test]
    fn full_slab_disconnects() {
        let bad: Vec<CellIndex> = (0..3)
            .flat_map(|k| (0..3).map(move |j| [2, j, k]))
            .collect();
        let g = build_graph(&grid([5, 3, 3], &bad));
        assert!(!check_feasibility(&g, [0, 0, 0], [4, 2, 2]));
        assert!(check_feasibility(&g, [0, 0, 0], [1, 2, 2]));
        let e = shortest_path(&g, [0, 0, 0], [4, 2, 2]).unwrap_err();
        assert!(e.start_feasible && e.goal_feasible && !e.connected);
    }

    #[test]
    fn tie_break_is_deterministic() {
        let g = build_graph(&grid([3, 3, 1], &[]));
        let a = shortest_path(&g, [0, 0, 0], [2, 0, 0]).unwrap();
        let b = shortest_path(&g, [0, 0, 0], [2, 0, 0]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.points, vec![[0, 0, 0], [1, 0, 0], [2, 0, 0]]);
    }

    #[test]
    fn bridge_expands_to_corners() {
        let map = grid([7, 1, 1], &[[2, 0, 0], [3, 0, 0]]);
        let g = build_outage_graph(&map, 50.0, 7);
        let r = shortest_path(&g, [0, 0, 0], [6, 0, 0]).unwrap();
        assert_eq!(r.length_m, 60.0);
        assert_eq!(r.points.first(), Some(&[0, 0, 0]));
        assert_eq!(r.points.last(), Some(&[6, 0, 0]));
        assert!(build_outage_graph(&map, 10.0, 3)
            .vertex([0, 0, 0])
            .is_some());
        assert!(shortest_path(&build_outage_graph(&map, 10.0, 3), [0, 0, 0], [6, 0, 0]).is_err());
    }
}
