//! Points, axis-aligned boxes and the regular 3D lattice shared by every map.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

/// Relative slack used when deciding whether a coordinate sits on a lattice
/// point or a cell boundary.
pub(crate) const LATTICE_TOL: f64 = 1e-9;

/// A position or displacement in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance(self, other: Vec3) -> f64 {
        (self - other).norm()
    }

    pub fn horizontal_distance(self, other: Vec3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn axis(self, a: usize) -> f64 {
        match a {
            0 => self.x,
            1 => self.y,
            2 => self.z,
            _ => panic!("axis index {a} out of range"),
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        v.to_array()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Closed axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn new(min: Vec3, max: Vec3) -> Self {
        Self { min, max }
    }

    /// Slab test for the closed segment `a -> b`. Touching a face, edge or
    /// corner counts as an intersection.
    pub fn intersects_segment(&self, a: Vec3, b: Vec3) -> bool {
        let dir = b - a;
        let mut t_enter = 0.0_f64;
        let mut t_exit = 1.0_f64;
        for axis in 0..3 {
            let origin = a.axis(axis);
            let d = dir.axis(axis);
            let lo = self.min.axis(axis);
            let hi = self.max.axis(axis);
            if d == 0.0 {
                if origin < lo || origin > hi {
                    return false;
                }
                continue;
            }
            let mut t0 = (lo - origin) / d;
            let mut t1 = (hi - origin) / d;
            if t0 > t1 {
                std::mem::swap(&mut t0, &mut t1);
            }
            t_enter = t_enter.max(t0);
            t_exit = t_exit.min(t1);
            if t_enter > t_exit {
                return false;
            }
        }
        true
    }
}

/// Integer cell index `(i, j, k)`, zero-based, `i` along x.
pub type CellIndex = [usize; 3];

/// Regular 3D lattice of cell centers with a common spacing on all axes.
///
/// `origin` is the center of cell `(0, 0, 0)`; cell `(i, j, k)` is the closed
/// box of edge `delta` centered at `origin + (i, j, k) * delta`. Flat storage
/// order puts `i` fastest: `(k * ny + j) * nx + i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub origin: Vec3,
    pub delta: f64,
    pub dims: [usize; 3],
}

impl Lattice {
    pub fn new(origin: Vec3, delta: f64, dims: [usize; 3]) -> Self {
        Self {
            origin,
            delta,
            dims,
        }
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn flat(&self, c: CellIndex) -> usize {
        (c[2] * self.dims[1] + c[1]) * self.dims[0] + c[0]
    }

    #[inline]
    pub fn unflat(&self, idx: usize) -> CellIndex {
        let nx = self.dims[0];
        let ny = self.dims[1];
        [idx % nx, (idx / nx) % ny, idx / (nx * ny)]
    }

    pub fn contains_index(&self, c: [i64; 3]) -> bool {
        (0..3).all(|a| c[a] >= 0 && (c[a] as usize) < self.dims[a])
    }

    pub fn position(&self, c: CellIndex) -> Vec3 {
        Vec3::new(
            self.origin.x + c[0] as f64 * self.delta,
            self.origin.y + c[1] as f64 * self.delta,
            self.origin.z + c[2] as f64 * self.delta,
        )
    }

    /// Lower corner of the region covered by the cells.
    pub fn min_corner(&self) -> Vec3 {
        self.origin - Vec3::new(1.0, 1.0, 1.0) * (0.5 * self.delta)
    }

    pub fn max_corner(&self) -> Vec3 {
        self.min_corner()
            + Vec3::new(
                self.dims[0] as f64,
                self.dims[1] as f64,
                self.dims[2] as f64,
            ) * self.delta
    }

    /// Cell whose closed box contains `u`. A point on a shared face, edge or
    /// corner resolves to the lexicographically smallest candidate index.
    pub fn cell_of(&self, u: Vec3) -> Option<CellIndex> {
        let mut out = [0usize; 3];
        for (a, slot) in out.iter_mut().enumerate() {
            let t = (u.axis(a) - self.origin.axis(a)) / self.delta;
            let mut i = (t - 0.5 - LATTICE_TOL).ceil();
            if i < 0.0 && t >= -0.5 - LATTICE_TOL {
                i = 0.0;
            }
            if i < 0.0 || i >= self.dims[a] as f64 {
                return None;
            }
            *slot = i as usize;
        }
        Some(out)
    }

    /// Lattice index of `u` if it coincides with a lattice point.
    pub fn snap(&self, u: Vec3) -> Option<CellIndex> {
        let mut out = [0usize; 3];
        for (a, slot) in out.iter_mut().enumerate() {
            let t = (u.axis(a) - self.origin.axis(a)) / self.delta;
            let r = t.round();
            if (t - r).abs() > LATTICE_TOL * (1.0 + t.abs()) {
                return None;
            }
            if r < 0.0 || r >= self.dims[a] as f64 {
                return None;
            }
            *slot = r as usize;
        }
        Some(out)
    }

    /// Integer offset of another lattice's origin relative to this one, when
    /// both share the spacing and the points coincide.
    pub fn offset_of(&self, other: &Lattice) -> Option<[i64; 3]> {
        if (self.delta - other.delta).abs() > LATTICE_TOL * self.delta {
            return None;
        }
        let mut out = [0i64; 3];
        for (a, slot) in out.iter_mut().enumerate() {
            let t = (other.origin.axis(a) - self.origin.axis(a)) / self.delta;
            let r = t.round();
            if (t - r).abs() > LATTICE_TOL * (1.0 + t.abs()) {
                return None;
            }
            *slot = r as i64;
        }
        Some(out)
    }

    pub fn iter_cells(&self) -> impl Iterator<Item = CellIndex> + '_ {
        (0..self.len()).map(move |idx| self.unflat(idx))
    }
}

/// Length of a polyline whose vertices are lattice points, computed from the
/// integer offsets so that equal-length paths give bitwise equal results.
///
/// Each segment of squared length `n` (in lattice units) is written as
/// `a * sqrt(b)` with `b` square-free; integer coefficients are accumulated
/// per `b` and summed in increasing `b`. Square roots of distinct square-free
/// integers are linearly independent over the rationals, so the
/// representation of any total length is unique.
pub fn lattice_polyline_length(points: &[[i64; 3]], delta: f64) -> f64 {
    let mut by_radical = std::collections::BTreeMap::<u64, u64>::new();
    for w in points.windows(2) {
        let n: u64 = (0..3)
            .map(|a| {
                let d = (w[1][a] - w[0][a]).unsigned_abs();
                d * d
            })
            .sum();
        if n == 0 {
            continue;
        }
        let (a, b) = split_square_free(n);
        *by_radical.entry(b).or_insert(0) += a;
    }
    by_radical
        .iter()
        .map(|(&b, &a)| a as f64 * (b as f64).sqrt() * delta)
        .sum()
}

/// Writes `n = a^2 * b` with `b` square-free.
fn split_square_free(mut n: u64) -> (u64, u64) {
    let mut a = 1u64;
    let mut b = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        a *= p.pow(e / 2);
        if e % 2 == 1 {
            b *= p;
        }
        p += 1;
    }
    b *= n;
    (a, b)
}
