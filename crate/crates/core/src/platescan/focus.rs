// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};
use spade::{DelaunayTriangulation, HasPosition, Point2, Triangulation};

use super::PlanError;

/// Stage position (µm) with its best-focus height (µm).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FocusPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

struct Vertex {
    pos: Point2<f64>,
    index: usize,
}

impl HasPosition for Vertex {
    type Scalar = f64;

    fn position(&self) -> Point2<f64> {
        self.pos
    }
}

/// Piecewise-linear focus height over a Delaunay triangulation. Outside the
/// hull the plane of the nearest triangle is extended.
#[derive(Debug, Clone)]
pub struct FocusSurface {
    points: Vec<FocusPoint>,
    triangles: Vec<[usize; 3]>,
}

pub fn focus_surface(points: &[FocusPoint]) -> Result<FocusSurface, PlanError> {
    for (i, p) in points.iter().enumerate() {
        if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
            return Err(PlanError::NonFinitePoint { index: i });
        }
        if let Some(j) = points[..i].iter().position(|q| q.x == p.x && q.y == p.y) {
            return Err(PlanError::DuplicatePoint { first: j, second: i });
        }
    }
    let mut tri: DelaunayTriangulation<Vertex> = DelaunayTriangulation::new();
    for (index, p) in points.iter().enumerate() {
        tri.insert(Vertex { pos: Point2::new(p.x, p.y), index }).map_err(|_| PlanError::NonFinitePoint { index })?;
    }
    let mut triangles: Vec<[usize; 3]> = tri
        .inner_faces()
        .map(|f| {
            let mut v = f.vertices().map(|h| h.data().index);
            v.sort_unstable();
            v
        })
        .collect();
    if triangles.is_empty() {
        return Err(PlanError::Degenerate(points.len()));
    }
    triangles.sort_unstable();
    Ok(FocusSurface { points: points.to_vec(), triangles })
}

impl FocusSurface {
    pub fn points(&self) -> &[FocusPoint] {
        &self.points
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    fn barycentric(&self, t: &[usize; 3], x: f64, y: f64) -> [f64; 3] {
        let [a, b, c] = t.map(|i| self.points[i]);
        let det = (b.y - c.y) * (a.x - c.x) + (c.x - b.x) * (a.y - c.y);
        let l0 = ((b.y - c.y) * (x - c.x) + (c.x - b.x) * (y - c.y)) / det;
        let l1 = ((c.y - a.y) * (x - c.x) + (a.x - c.x) * (y - c.y)) / det;
        [l0, l1, 1.0 - l0 - l1]
    }

    fn plane(&self, t: &[usize; 3], x: f64, y: f64) -> f64 {
        let l = self.barycentric(t, x, y);
        l[0] * self.points[t[0]].z + l[1] * self.points[t[1]].z + l[2] * self.points[t[2]].z
    }

    fn distance(&self, t: &[usize; 3], x: f64, y: f64) -> f64 {
        if self.barycentric(t, x, y).iter().all(|&l| l >= 0.0) {
            return 0.0;
        }
        let seg = |i: usize, j: usize| {
            let (a, b) = (self.points[t[i]], self.points[t[j]]);
            let (dx, dy) = (b.x - a.x, b.y - a.y);
            let s = (((x - a.x) * dx + (y - a.y) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
            (x - a.x - s * dx).hypot(y - a.y - s * dy)
        };
        seg(0, 1).min(seg(1, 2)).min(seg(2, 0))
    }

    /// Focus height at stage position `(x, y)`.
    pub fn z_at(&self, x: f64, y: f64) -> f64 {
        if let Some(p) = self.points.iter().find(|p| p.x == x && p.y == y) {
            return p.z;
        }
        let t = self
            .triangles
            .iter()
            .map(|t| (self.distance(t, x, y), t))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, t)| t)
            .expect("at least one triangle");
        self.plane(t, x, y)
    }
}
