//! Exact length of a polyline spent inside flagged cells.

use crate::geometry::{Lattice, Vec3};
use crate::planner::Path;
use crate::sinrmap::SinrMap;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OutageReport {
    /// Length inside flagged cells plus length outside the lattice volume.
    pub outage_m: f64,
    pub total_m: f64,
    pub outside_m: f64,
}

impl OutageReport {
    pub fn fraction(&self) -> f64 {
        if self.total_m > 0.0 {
            (self.outage_m / self.total_m).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }

    pub fn left_region(&self) -> bool {
        self.outside_m > 0.0
    }
}

/// Walks each segment of `waypoints` across the cell boxes of `lattice` and
/// sums the sub-lengths in cells where `bad(flat_index)` holds.
///
/// Crossing parameters are collected per axis, each sub-interval is
/// classified by its midpoint, so no sampling is involved.
pub fn outage_along(
    lattice: &Lattice,
    waypoints: &[Vec3],
    bad: impl Fn(usize) -> bool,
) -> OutageReport {
    let mut report = OutageReport::default();
    let lo = lattice.min_corner();
    let d = lattice.delta;
    let mut ts: Vec<f64> = Vec::new();
    for w in waypoints.windows(2) {
        let (p, q) = (w[0], w[1]);
        let len = p.distance(q);
        if len == 0.0 {
            continue;
        }
        report.total_m += len;
        ts.clear();
        ts.push(0.0);
        ts.push(1.0);
        for a in 0..3 {
            let (pa, qa) = (p.axis(a), q.axis(a));
            let da = qa - pa;
            if da == 0.0 {
                continue;
            }
            let first = ((pa.min(qa) - lo.axis(a)) / d).ceil() as i64;
            let last = ((pa.max(qa) - lo.axis(a)) / d).floor() as i64;
            for n in first..=last {
                let t = (lo.axis(a) + n as f64 * d - pa) / da;
                if t > 0.0 && t < 1.0 {
                    ts.push(t);
                }
            }
        }
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        for iv in ts.windows(2) {
            let (t0, t1) = (iv[0], iv[1]);
            let piece = len * (t1 - t0);
            let mid = p + (q - p) * (0.5 * (t0 + t1));
            let mut idx = [0i64; 3];
            for (a, slot) in idx.iter_mut().enumerate() {
                *slot = ((mid.axis(a) - lo.axis(a)) / d).floor() as i64;
            }
            if !lattice.contains_index(idx) {
                report.outside_m += piece;
                report.outage_m += piece;
            } else if bad(lattice.flat([idx[0] as usize, idx[1] as usize, idx[2] as usize])) {
                report.outage_m += piece;
            }
        }
    }
    if report.left_region() {
        log::warn!(
            "path leaves the mapped volume for {:.3} m",
            report.outside_m
        );
    }
    report
}

/// Fraction of the path length flown where the map is below `gamma_t_db`.
pub fn connectivity_outage(path: &Path, actual: &SinrMap, gamma_t_db: f64) -> OutageReport {
    outage_along(&actual.lattice, &path.waypoints, |idx| {
        actual.sinr_db[idx] < gamma_t_db
    })
}
