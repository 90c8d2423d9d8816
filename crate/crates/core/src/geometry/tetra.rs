use serde::{Deserialize, Serialize};

use super::mensuration;
use super::point::{det3, Aabb, Point3};
use super::polyhedron::{ConvexPolyhedron, Face, Plane};
use crate::error::{Error, Result};

/// A tetrahedron given by its vertices. Edge lengths are always derived from the
/// coordinates, so the two views cannot drift apart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tetra {
    v: [Point3; 4],
}

impl Tetra {
    pub fn new(v: [Point3; 4]) -> Self {
        Tetra { v }
    }

    /// Builds a tetrahedron from l1..l6 (l1,l2,l3 at v0; l4=|v2v3|, l5=|v1v3|, l6=|v1v2|).
    pub fn from_edge_lengths(l: [f64; 6]) -> Result<Tetra> {
        let [l1, l2, l3, l4, l5, l6] = l;
        if l.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
            return Err(Error::InvalidInput("edge lengths must be positive".into()));
        }
        let v1 = Point3::new(l1, 0.0, 0.0);
        let x2 = (l1 * l1 + l2 * l2 - l6 * l6) / (2.0 * l1);
        let y2sq = l2 * l2 - x2 * x2;
        if y2sq <= 0.0 {
            return Err(Error::Degenerate("face triangle"));
        }
        let y2 = y2sq.sqrt();
        let v2 = Point3::new(x2, y2, 0.0);
        let x3 = (l1 * l1 + l3 * l3 - l5 * l5) / (2.0 * l1);
        let y3 = (l3 * l3 - l4 * l4 + x2 * x2 + y2 * y2 - 2.0 * x2 * x3) / (2.0 * y2);
        let z3sq = l3 * l3 - x3 * x3 - y3 * y3;
        if z3sq <= 0.0 {
            return Err(Error::Degenerate("tetrahedron"));
        }
        Ok(Tetra::new([Point3::ORIGIN, v1, v2, Point3::new(x3, y3, z3sq.sqrt())]))
    }

    pub fn vertices(&self) -> &[Point3; 4] {
        &self.v
    }

    pub fn vertex(&self, k: usize) -> Point3 {
        self.v[k]
    }

    /// l1..l6 with vertex `k` playing the role of v0. The other three vertices
    /// keep their cyclic order.
    pub fn lengths_from(&self, k: usize) -> [f64; 6] {
        let o = [(k + 1) % 4, (k + 2) % 4, (k + 3) % 4];
        let (v0, v1, v2, v3) = (self.v[k], self.v[o[0]], self.v[o[1]], self.v[o[2]]);
        [
            v0.dist(v1),
            v0.dist(v2),
            v0.dist(v3),
            v2.dist(v3),
            v1.dist(v3),
            v1.dist(v2),
        ]
    }

    pub fn edge_lengths(&self) -> [f64; 6] {
        self.lengths_from(0)
    }

    pub fn squared_lengths(&self) -> [f64; 6] {
        self.edge_lengths().map(|l| l * l)
    }

    pub fn signed_volume(&self) -> f64 {
        det3(self.v[1] - self.v[0], self.v[2] - self.v[0], self.v[3] - self.v[0]) / 6.0
    }

    pub fn volume(&self) -> f64 {
        self.signed_volume().abs()
    }

    pub fn centroid(&self) -> Point3 {
        (self.v[0] + self.v[1] + self.v[2] + self.v[3]) / 4.0
    }

    pub fn bbox(&self) -> Aabb {
        Aabb::from_points(self.v).unwrap()
    }

    pub fn solid_angle(&self, k: usize) -> Result<f64> {
        mensuration::solid_angle(self, k)
    }

    pub fn circumcenter(&self) -> Result<(Point3, f64)> {
        mensuration::circumcenter(self)
    }

    /// Barycentric coordinates of `p`.
    pub fn barycentric(&self, p: Point3) -> Result<[f64; 4]> {
        let vol = self.signed_volume();
        let scale = self.edge_lengths().iter().cloned().fold(0.0, f64::max).powi(3);
        if !(vol.abs() > 1e-13 * scale) {
            return Err(Error::Degenerate("tetrahedron"));
        }
        let mut lam = [0.0; 4];
        for (i, l) in lam.iter_mut().enumerate() {
            let mut w = self.v;
            w[i] = p;
            *l = Tetra::new(w).signed_volume() / vol;
        }
        Ok(lam)
    }

    /// Closed containment with an absolute slack in barycentric units.
    pub fn contains(&self, p: Point3, tol: f64) -> bool {
        self.barycentric(p)
            .map(|l| l.iter().all(|x| *x >= -tol))
            .unwrap_or(false)
    }

    /// The tetrahedron as a polyhedron with outward-facing faces.
    pub fn to_polyhedron(&self) -> ConvexPolyhedron {
        let mut v = self.v;
        if self.signed_volume() < 0.0 {
            v.swap(2, 3);
        }
        // With positive orientation, faces listed counter-clockwise seen from outside.
        let idx = [[1, 2, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]];
        let faces = idx
            .iter()
            .map(|f| {
                let pts = vec![v[f[0]], v[f[1]], v[f[2]]];
                Face::new(Plane::through(pts[0], pts[1], pts[2]), pts)
            })
            .collect();
        ConvexPolyhedron::from_faces(faces)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn regular() -> Tetra {
        let s = 2f64.sqrt();
        Tetra::new([
            Point3::new(1.0, 1.0, 1.0) * (1.0 / s),
            Point3::new(1.0, -1.0, -1.0) * (1.0 / s),
            Point3::new(-1.0, 1.0, -1.0) * (1.0 / s),
            Point3::new(-1.0, -1.0, 1.0) * (1.0 / s),
        ])
    }

    pub fn corner() -> Tetra {
        Tetra::new([
            Point3::ORIGIN,
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.0, 0.0, 1.0),
        ])
    }

    #[test]
    fn regular_has_edge_two() {
        for l in regular().edge_lengths() {
            assert!((l - 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn edge_order_matches_definition() {
        let t = Tetra::new([
            Point3::ORIGIN,
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 2.0, 0.0),
            Point3::new(0.0, 0.0, 3.0),
        ]);
        let l = t.edge_lengths();
        assert_eq!(&l[..3], &[1.0, 2.0, 3.0]);
        assert!((l[3] - 13f64.sqrt()).abs() < 1e-15);
        assert!((l[4] - 10f64.sqrt()).abs() < 1e-15);
        assert!((l[5] - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rebuild_from_lengths() {
        let t = Tetra::new([
            Point3::new(0.3, -0.2, 0.1),
            Point3::new(2.1, 0.4, -0.3),
            Point3::new(0.8, 2.2, 0.5),
            Point3::new(0.9, 0.7, 2.4),
        ]);
        let r = Tetra::from_edge_lengths(t.edge_lengths()).unwrap();
        for (a, b) in t.edge_lengths().iter().zip(r.edge_lengths()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((t.volume() - r.volume()).abs() < 1e-12);
    }

    #[test]
    fn barycentric_of_centroid() {
        let t = regular();
        for l in t.barycentric(t.centroid()).unwrap() {
            assert!((l - 0.25).abs() < 1e-15);
        }
        assert!(t.contains(t.centroid(), 0.0));
        assert!(!t.contains(Point3::new(5.0, 0.0, 0.0), 1e-9));
    }

    #[test]
    fn polyhedron_volume_matches() {
        let t = Tetra::new([
            Point3::ORIGIN,
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 0.0, 1.0),
        ]);
        let p = t.to_polyhedron();
        assert!((p.volume() - 1.0 / 6.0).abs() < 1e-15);
        assert!(p.contains(Point3::new(0.1, 0.1, 0.1), 0.0));
    }
}
