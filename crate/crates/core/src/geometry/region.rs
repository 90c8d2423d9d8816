use serde::{Deserialize, Serialize};

use super::ball::ball_intersection_volume;
use super::point::{Aabb, Point3};
use super::polyhedron::{ConvexPolyhedron, Plane};

/// Finite union of non-overlapping convex pieces, optionally owned by a vertex.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub owner: Option<usize>,
    pub pieces: Vec<ConvexPolyhedron>,
}

impl Region {
    pub fn new(owner: Option<usize>, pieces: Vec<ConvexPolyhedron>) -> Self {
        Region { owner, pieces }
    }

    pub fn volume(&self) -> f64 {
        self.pieces.iter().map(|p| p.volume()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn bbox(&self) -> Option<Aabb> {
        let mut it = self.pieces.iter().map(|p| p.bbox());
        let first = it.next()?;
        Some(it.fold(first, |a, b| Aabb::new(a.min.min(b.min), a.max.max(b.max))))
    }

    pub fn contains(&self, p: Point3, tol: f64) -> bool {
        self.pieces.iter().any(|q| q.contains(p, tol))
    }

    /// Removes `other` from every piece.
    pub fn subtract(&mut self, other: &ConvexPolyhedron, min_volume: f64) {
        let mut out = Vec::with_capacity(self.pieces.len());
        for p in self.pieces.drain(..) {
            out.extend(p.subtract(other, min_volume));
        }
        self.pieces = out;
    }

    /// Splits every piece by `plane`, dropping sub-pieces of volume at most `min_volume`.
    pub fn split_by(&mut self, plane: &Plane, min_volume: f64) {
        let mut out = Vec::with_capacity(self.pieces.len());
        for p in self.pieces.drain(..) {
            let (a, b) = p.split(plane);
            match (a, b) {
                (Some(a), Some(b)) => {
                    out.extend([a, b].into_iter().filter(|q| q.volume() > min_volume));
                }
                (Some(a), None) => out.push(a),
                (None, Some(b)) => out.push(b),
                (None, None) => {}
            }
        }
        self.pieces = out;
    }

    pub fn drop_small(&mut self, min_volume: f64) {
        self.pieces.retain(|p| p.volume() > min_volume);
    }

    /// Volume of the region covered by unit balls at `centers`. The balls must have
    /// disjoint interiors.
    pub fn covered_volume(&self, centers: &[Point3]) -> f64 {
        covered_volume(self, centers)
    }
}

/// Volume of `r ∩ ⋃ B(c, 1)` for unit balls with disjoint interiors.
pub fn covered_volume(r: &Region, centers: &[Point3]) -> f64 {
    let mut s = 0.0;
    for p in &r.pieces {
        let bb = p.bbox();
        for &c in centers {
            if bb.distance_to(c) < 1.0 {
                s += ball_intersection_volume(p, c, 1.0);
            }
        }
    }
    s
}

/// Output of [`halfspace_cell`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfspaceCell {
    pub poly: ConvexPolyhedron,
    /// False when the cell still touches the clip box.
    pub bounded: bool,
}

/// Points of `clip_box` at least as close to `center` as to every neighbor.
pub fn halfspace_cell(center: Point3, neighbors: &[Point3], clip_box: &Aabb) -> HalfspaceCell {
    let mut nb: Vec<(f64, Point3)> = neighbors
        .iter()
        .map(|&w| (w.dist2(center), w))
        .filter(|(d, _)| *d > 0.0)
        .collect();
    nb.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut poly = ConvexPolyhedron::from_box(clip_box);
    let mut reach2 = far_vertex2(&poly, center);
    for (d2, w) in nb {
        // A bisector farther than every vertex cannot cut the cell.
        if d2 > 4.0 * reach2 {
            break;
        }
        match poly.clip(&Plane::bisector(center, w)) {
            Some(p) => poly = p,
            None => break,
        }
        reach2 = far_vertex2(&poly, center);
    }
    let bounded = !poly.faces().iter().any(|f| {
        f.vertices.iter().any(|&p| clip_box.depth(p) < 1e-9)
    });
    HalfspaceCell { poly, bounded }
}

fn far_vertex2(p: &ConvexPolyhedron, c: Point3) -> f64 {
    p.faces()
        .iter()
        .flat_map(|f| f.vertices.iter())
        .map(|q| q.dist2(c))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn axis_neighbors_give_cube() {
        let n: Vec<Point3> = [[2., 0., 0.], [-2., 0., 0.], [0., 2., 0.], [0., -2., 0.], [0., 0., 2.], [0., 0., -2.]]
            .iter()
            .map(|a| Point3::from(*a))
            .collect();
        let cell = halfspace_cell(Point3::ORIGIN, &n, &Aabb::cube(Point3::ORIGIN, 10.0));
        assert!(cell.bounded);
        assert!((cell.poly.volume() - 8.0).abs() < 1e-12);
        let r = Region::new(Some(0), vec![cell.poly]);
        assert!((r.covered_volume(&[Point3::ORIGIN]) - 4.0 * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn no_neighbors_is_flagged() {
        let cell = halfspace_cell(Point3::ORIGIN, &[], &Aabb::cube(Point3::ORIGIN, 3.0));
        assert!(!cell.bounded);
        assert!((cell.poly.volume() - 216.0).abs() < 1e-10);
    }

    #[test]
    fn disjoint_region_is_uncovered() {
        let r = Region::new(None, vec![ConvexPolyhedron::from_box(&Aabb::cube(Point3::new(5.0, 0.0, 0.0), 1.0))]);
        assert_eq!(r.covered_volume(&[Point3::ORIGIN]), 0.0);
    }
}
