use serde::{Deserialize, Serialize};

use super::point::{Aabb, Point3};

/// Classification slack for clipping, in length units.
const CLIP_EPS: f64 = 1e-10;
/// Points closer than this are merged.
const MERGE_EPS: f64 = 1e-9;

/// Closed half-space `normal · x <= offset` with unit normal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plane {
    pub normal: Point3,
    pub offset: f64,
}

impl Plane {
    /// `normal` need not be unit length.
    pub fn new(normal: Point3, point: Point3) -> Self {
        let n = normal / normal.norm();
        Plane { normal: n, offset: n.dot(point) }
    }

    /// Plane through three points, inside to the right of the counter-clockwise order.
    pub fn through(a: Point3, b: Point3, c: Point3) -> Self {
        Plane::new((b - a).cross(c - a), a)
    }

    /// Points at least as close to `v` as to `w`.
    pub fn bisector(v: Point3, w: Point3) -> Self {
        Plane::new(w - v, v.midpoint(w))
    }

    pub fn signed_distance(&self, p: Point3) -> f64 {
        self.normal.dot(p) - self.offset
    }

    pub fn flipped(&self) -> Plane {
        Plane { normal: -self.normal, offset: -self.offset }
    }

    fn project(&self, p: Point3) -> Point3 {
        p - self.normal * self.signed_distance(p)
    }
}

/// Planar convex polygon lying on `plane`, counter-clockwise seen from outside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Face {
    pub plane: Plane,
    pub vertices: Vec<Point3>,
}

impl Face {
    pub fn new(plane: Plane, vertices: Vec<Point3>) -> Self {
        Face { plane, vertices }
    }

    pub fn area(&self) -> f64 {
        let p0 = self.vertices[0];
        let mut s = 0.0;
        for w in self.vertices[1..].windows(2) {
            s += (w[0] - p0).cross(w[1] - p0).dot(self.plane.normal);
        }
        0.5 * s
    }
}

/// Bounded convex polyhedron stored by its faces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolyhedron {
    faces: Vec<Face>,
}

impl ConvexPolyhedron {
    pub fn from_faces(faces: Vec<Face>) -> Self {
        ConvexPolyhedron { faces }
    }

    pub fn from_box(b: &Aabb) -> Self {
        let (lo, hi) = (b.min, b.max);
        let c = |i: usize| {
            Point3::new(
                if i & 1 == 0 { lo.x } else { hi.x },
                if i & 2 == 0 { lo.y } else { hi.y },
                if i & 4 == 0 { lo.z } else { hi.z },
            )
        };
        let quads: [([usize; 4], Point3); 6] = [
            ([0, 2, 6, 4], Point3::new(-1.0, 0.0, 0.0)),
            ([1, 5, 7, 3], Point3::new(1.0, 0.0, 0.0)),
            ([0, 4, 5, 1], Point3::new(0.0, -1.0, 0.0)),
            ([2, 3, 7, 6], Point3::new(0.0, 1.0, 0.0)),
            ([0, 1, 3, 2], Point3::new(0.0, 0.0, -1.0)),
            ([4, 6, 7, 5], Point3::new(0.0, 0.0, 1.0)),
        ];
        let faces = quads
            .iter()
            .map(|(q, n)| {
                let mut f = Face::new(Plane::new(*n, c(q[0])), q.iter().map(|&i| c(i)).collect());
                if f.area() < 0.0 {
                    f.vertices.reverse();
                }
                f
            })
            .collect();
        ConvexPolyhedron { faces }
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn planes(&self) -> impl Iterator<Item = &Plane> + '_ {
        self.faces.iter().map(|f| &f.plane)
    }

    /// Distinct vertices.
    pub fn vertices(&self) -> Vec<Point3> {
        let mut out: Vec<Point3> = Vec::new();
        for f in &self.faces {
            for &p in &f.vertices {
                if !out.iter().any(|q| q.dist2(p) < MERGE_EPS * MERGE_EPS) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// Average of the distinct vertices; an interior point.
    pub fn center(&self) -> Point3 {
        let v = self.vertices();
        v.iter().fold(Point3::ORIGIN, |a, &b| a + b) / v.len() as f64
    }

    pub fn bbox(&self) -> Aabb {
        Aabb::from_points(self.faces.iter().flat_map(|f| f.vertices.iter().copied()))
            .unwrap_or(Aabb::new(Point3::ORIGIN, Point3::ORIGIN))
    }

    pub fn volume(&self) -> f64 {
        if self.faces.len() < 4 {
            return 0.0;
        }
        let c = self.center();
        let v: f64 = self
            .faces
            .iter()
            .map(|f| f.area() * (-f.plane.signed_distance(c)) / 3.0)
            .sum();
        v.max(0.0)
    }

    /// Volume-weighted centroid.
    pub fn centroid(&self) -> Point3 {
        let c = self.center();
        let mut acc = Point3::ORIGIN;
        let mut vol = 0.0;
        for f in &self.faces {
            let p0 = f.vertices[0];
            for w in f.vertices[1..].windows(2) {
                let t = super::point::det3(p0 - c, w[0] - c, w[1] - c) / 6.0;
                acc += (c + p0 + w[0] + w[1]) * (t / 4.0);
                vol += t;
            }
        }
        if vol.abs() > 0.0 {
            acc / vol
        } else {
            c
        }
    }

    pub fn contains(&self, p: Point3, tol: f64) -> bool {
        self.faces.iter().all(|f| f.plane.signed_distance(p) <= tol)
    }

    pub fn diameter(&self) -> f64 {
        let v = self.vertices();
        let mut d: f64 = 0.0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                d = d.max(v[i].dist(v[j]));
            }
        }
        d
    }

    pub fn translate(&self, by: Point3) -> Self {
        let faces = self
            .faces
            .iter()
            .map(|f| Face {
                plane: Plane { normal: f.plane.normal, offset: f.plane.offset + f.plane.normal.dot(by) },
                vertices: f.vertices.iter().map(|&p| p + by).collect(),
            })
            .collect();
        ConvexPolyhedron { faces }
    }

    /// Keeps the part inside `plane`. `None` when nothing of positive volume remains.
    pub fn clip(&self, plane: &Plane) -> Option<ConvexPolyhedron> {
        let mut any_in = false;
        let mut any_out = false;
        for f in &self.faces {
            for &p in &f.vertices {
                let s = plane.signed_distance(p);
                any_in |= s < -CLIP_EPS;
                any_out |= s > CLIP_EPS;
            }
        }
        if !any_out {
            return Some(self.clone());
        }
        if !any_in {
            return None;
        }
        let mut faces = Vec::with_capacity(self.faces.len() + 1);
        let mut cut: Vec<Point3> = Vec::new();
        for f in &self.faces {
            let n = f.vertices.len();
            let s: Vec<f64> = f.vertices.iter().map(|&p| plane.signed_distance(p)).collect();
            let mut out: Vec<Point3> = Vec::with_capacity(n + 1);
            for i in 0..n {
                let j = (i + 1) % n;
                let (p, q) = (f.vertices[i], f.vertices[j]);
                if s[i] <= CLIP_EPS {
                    push_distinct(&mut out, p);
                    if s[i] >= -CLIP_EPS {
                        cut.push(p);
                    }
                }
                if (s[i] < -CLIP_EPS && s[j] > CLIP_EPS) || (s[i] > CLIP_EPS && s[j] < -CLIP_EPS) {
                    let t = s[i] / (s[i] - s[j]);
                    let x = p + (q - p) * t;
                    push_distinct(&mut out, x);
                    cut.push(x);
                }
            }
            if out.len() > 1 && out[0].dist2(*out.last().unwrap()) < MERGE_EPS * MERGE_EPS {
                out.pop();
            }
            if out.len() >= 3 {
                faces.push(Face::new(f.plane, out));
            }
        }
        let mut cap: Vec<Point3> = Vec::new();
        for p in cut {
            if !cap.iter().any(|q| q.dist2(p) < MERGE_EPS * MERGE_EPS) {
                cap.push(plane.project(p));
            }
        }
        if cap.len() >= 3 {
            let c = cap.iter().fold(Point3::ORIGIN, |a, &b| a + b) / cap.len() as f64;
            let u = plane.normal.any_orthogonal();
            let w = plane.normal.cross(u);
            cap.sort_by(|a, b| {
                let ta = (*a - c).dot(w).atan2((*a - c).dot(u));
                let tb = (*b - c).dot(w).atan2((*b - c).dot(u));
                ta.total_cmp(&tb)
            });
            faces.push(Face::new(*plane, cap));
        }
        (faces.len() >= 4).then_some(ConvexPolyhedron { faces })
    }

    /// Splits by `plane` into (inside, outside).
    pub fn split(&self, plane: &Plane) -> (Option<ConvexPolyhedron>, Option<ConvexPolyhedron>) {
        (self.clip(plane), self.clip(&plane.flipped()))
    }

    pub fn intersect(&self, other: &ConvexPolyhedron) -> Option<ConvexPolyhedron> {
        if self.separated_from(other) {
            return None;
        }
        let mut cur = self.clone();
        for p in other.planes() {
            cur = cur.clip(p)?;
        }
        Some(cur)
    }

    pub fn intersection_volume(&self, other: &ConvexPolyhedron) -> f64 {
        self.intersect(other).map_or(0.0, |p| p.volume())
    }

    /// `self − other` as disjoint convex pieces (at most one per face of `other`).
    /// Pieces with volume at most `min_volume` are dropped.
    pub fn subtract(&self, other: &ConvexPolyhedron, min_volume: f64) -> Vec<ConvexPolyhedron> {
        if self.separated_from(other) {
            return vec![self.clone()];
        }
        let mut out = Vec::new();
        let mut rest = self.clone();
        for p in other.planes() {
            let (inside, outside) = rest.split(p);
            if let Some(o) = outside {
                if o.volume() > min_volume {
                    out.push(o);
                }
            }
            match inside {
                Some(i) => rest = i,
                None => return out,
            }
        }
        out
    }

    /// True when some face plane of either polyhedron separates them (up to slack).
    /// A `false` answer is inconclusive.
    pub fn separated_from(&self, other: &ConvexPolyhedron) -> bool {
        if !self.bbox().inflate(CLIP_EPS).intersects(&other.bbox()) {
            return true;
        }
        let sep = |a: &ConvexPolyhedron, b: &ConvexPolyhedron| {
            a.planes().any(|pl| {
                b.faces
                    .iter()
                    .all(|f| f.vertices.iter().all(|&p| pl.signed_distance(p) >= -CLIP_EPS))
            })
        };
        sep(self, other) || sep(other, self)
    }
}

fn push_distinct(v: &mut Vec<Point3>, p: Point3) {
    if v.last().map_or(true, |q| q.dist2(p) >= MERGE_EPS * MERGE_EPS) {
        v.push(p);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_cube() -> ConvexPolyhedron {
        ConvexPolyhedron::from_box(&Aabb::new(Point3::ORIGIN, Point3::new(1.0, 1.0, 1.0)))
    }

    #[test]
    fn box_faces_point_outward() {
        let c = unit_cube();
        assert!((c.volume() - 1.0).abs() < 1e-15);
        for f in c.faces() {
            assert!((f.area() - 1.0).abs() < 1e-15);
            assert!(f.plane.signed_distance(Point3::new(0.5, 0.5, 0.5)) < 0.0);
        }
        assert_eq!(c.vertices().len(), 8);
    }

    #[test]
    fn clip_diagonal_halves_cube() {
        let c = unit_cube();
        let p = Plane::new(Point3::new(1.0, 1.0, 1.0), Point3::new(0.5, 0.5, 0.5));
        let (a, b) = c.split(&p);
        let (a, b) = (a.unwrap(), b.unwrap());
        assert!((a.volume() - 0.5).abs() < 1e-14);
        assert!((b.volume() - 0.5).abs() < 1e-14);
        assert_eq!(a.face_count(), 7);
    }

    #[test]
    fn clip_through_vertices_cuts_corner() {
        let c = unit_cube();
        let p = Plane::new(Point3::new(-1.0, -1.0, -1.0), Point3::new(1.0, 0.0, 0.0));
        let a = c.clip(&p).unwrap();
        assert!((a.volume() - 5.0 / 6.0).abs() < 1e-14);
        let b = c.clip(&p.flipped()).unwrap();
        assert!((b.volume() - 1.0 / 6.0).abs() < 1e-14);
        assert_eq!(b.face_count(), 4);
    }

    #[test]
    fn clip_touching_keeps_or_drops() {
        let c = unit_cube();
        let keep = Plane::new(Point3::new(1.0, 0.0, 0.0), Point3::new(1.0, 0.0, 0.0));
        assert_eq!(c.clip(&keep).unwrap(), c);
        assert!(c.clip(&keep.flipped()).is_none());
    }

    #[test]
    fn subtract_inner_box() {
        let c = ConvexPolyhedron::from_box(&Aabb::cube(Point3::ORIGIN, 1.0));
        let inner = ConvexPolyhedron::from_box(&Aabb::cube(Point3::ORIGIN, 0.5));
        let pieces = c.subtract(&inner, 0.0);
        let v: f64 = pieces.iter().map(|p| p.volume()).sum();
        assert!((v - 7.0).abs() < 1e-13);
        assert_eq!(pieces.len(), 6);
        for i in 0..pieces.len() {
            for j in i + 1..pieces.len() {
                assert!(pieces[i].intersection_volume(&pieces[j]) < 1e-12);
            }
        }
    }

    #[test]
    fn centroid_of_corner_tetra() {
        let c = unit_cube();
        let p = Plane::new(Point3::new(1.0, 1.0, 1.0), Point3::new(1.0, 0.0, 0.0));
        let t = c.clip(&p).unwrap();
        assert!(t.centroid().dist(Point3::new(0.25, 0.25, 0.25)) < 1e-14);
    }

    #[test]
    fn separation() {
        let a = unit_cube();
        let b = a.translate(Point3::new(1.0, 0.0, 0.0));
        assert!(a.separated_from(&b));
        assert!(a.intersection_volume(&b) < 1e-15);
        let c = a.translate(Point3::new(0.5, 0.5, 0.0));
        assert!(!a.separated_from(&c));
        assert!((a.intersection_volume(&c) - 0.25).abs() < 1e-14);
    }
}
