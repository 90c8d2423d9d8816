use std::cmp::Ordering;
use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A point (or vector) in R^3, in units where the sphere radius is 1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn dot(self, o: Point3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Point3) -> Point3 {
        Point3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm2().sqrt()
    }

    pub fn dist(self, o: Point3) -> f64 {
        (self - o).norm()
    }

    pub fn dist2(self, o: Point3) -> f64 {
        (self - o).norm2()
    }

    /// Unit vector in the same direction; `None` for (near) zero vectors.
    pub fn normalized(self) -> Option<Point3> {
        let n = self.norm();
        (n > 1e-300).then(|| self / n)
    }

    pub fn midpoint(self, o: Point3) -> Point3 {
        (self + o) * 0.5
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn min(self, o: Point3) -> Point3 {
        Point3::new(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    pub fn max(self, o: Point3) -> Point3 {
        Point3::new(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }

    /// Total lexicographic order on coordinates, used for deterministic tie-breaks.
    pub fn lex_cmp(&self, o: &Point3) -> Ordering {
        self.x
            .total_cmp(&o.x)
            .then(self.y.total_cmp(&o.y))
            .then(self.z.total_cmp(&o.z))
    }

    /// Some unit vector orthogonal to `self` (which must be non-zero).
    pub fn any_orthogonal(self) -> Point3 {
        let a = if self.x.abs() < 0.6 {
            Point3::new(1.0, 0.0, 0.0)
        } else if self.y.abs() < 0.6 {
            Point3::new(0.0, 1.0, 0.0)
        } else {
            Point3::new(0.0, 0.0, 1.0)
        };
        let c = self.cross(a);
        c / c.norm()
    }
}

/// `det[a, b, c]` = a · (b × c).
pub fn det3(a: Point3, b: Point3, c: Point3) -> f64 {
    a.dot(b.cross(c))
}

impl From<[f64; 3]> for Point3 {
    fn from(a: [f64; 3]) -> Self {
        Point3::new(a[0], a[1], a[2])
    }
}

impl From<Point3> for [f64; 3] {
    fn from(p: Point3) -> Self {
        p.to_array()
    }
}

impl Index<usize> for Point3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Point3 index {i} out of range"),
        }
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Point3 {
    fn add_assign(&mut self, o: Point3) {
        *self = *self + o;
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Point3 {
    type Output = Point3;
    fn neg(self) -> Point3 {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Point3 {
    type Output = Point3;
    fn div(self, s: f64) -> Point3 {
        Point3::new(self.x / s, self.y / s, self.z / s)
    }
}

/// Axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Point3,
    pub max: Point3,
}

impl Aabb {
    pub fn new(min: Point3, max: Point3) -> Self {
        Aabb { min, max }
    }

    pub fn cube(center: Point3, half: f64) -> Self {
        let h = Point3::new(half, half, half);
        Aabb::new(center - h, center + h)
    }

    pub fn from_points<I: IntoIterator<Item = Point3>>(pts: I) -> Option<Self> {
        let mut it = pts.into_iter();
        let first = it.next()?;
        Some(it.fold(Aabb::new(first, first), |b, p| {
            Aabb::new(b.min.min(p), b.max.max(p))
        }))
    }

    pub fn inflate(&self, r: f64) -> Aabb {
        let d = Point3::new(r, r, r);
        Aabb::new(self.min - d, self.max + d)
    }

    pub fn extent(&self) -> Point3 {
        self.max - self.min
    }

    pub fn center(&self) -> Point3 {
        self.min.midpoint(self.max)
    }

    pub fn volume(&self) -> f64 {
        let e = self.extent();
        e.x.max(0.0) * e.y.max(0.0) * e.z.max(0.0)
    }

    pub fn contains(&self, p: Point3) -> bool {
        (0..3).all(|k| p[k] >= self.min[k] && p[k] <= self.max[k])
    }

    pub fn contains_box(&self, o: &Aabb, tol: f64) -> bool {
        (0..3).all(|k| o.min[k] >= self.min[k] - tol && o.max[k] <= self.max[k] + tol)
    }

    pub fn intersects(&self, o: &Aabb) -> bool {
        (0..3).all(|k| self.min[k] <= o.max[k] && o.min[k] <= self.max[k])
    }

    /// Euclidean distance from `p` to the box (0 inside).
    pub fn distance_to(&self, p: Point3) -> f64 {
        let mut s = 0.0;
        for k in 0..3 {
            let d = (self.min[k] - p[k]).max(0.0).max(p[k] - self.max[k]);
            s += d * d;
        }
        s.sqrt()
    }

    /// Distance from an inside point to the nearest face of the box (negative outside).
    pub fn depth(&self, p: Point3) -> f64 {
        (0..3)
            .map(|k| (p[k] - self.min[k]).min(self.max[k] - p[k]))
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_is_right_handed() {
        let x = Point3::new(1.0, 0.0, 0.0);
        let y = Point3::new(0.0, 1.0, 0.0);
        assert_eq!(x.cross(y), Point3::new(0.0, 0.0, 1.0));
        assert_eq!(det3(x, y, x.cross(y)), 1.0);
    }

    #[test]
    fn orthogonal_is_unit_and_orthogonal() {
        for v in [Point3::new(1.0, 2.0, 3.0), Point3::new(0.0, 0.0, -2.0), Point3::new(5.0, 0.1, 0.0)] {
            let o = v.any_orthogonal();
            assert!((o.norm() - 1.0).abs() < 1e-15);
            assert!(o.dot(v).abs() < 1e-14);
        }
    }

    #[test]
    fn serializes_as_triple() {
        let p = Point3::new(1.0, -2.5, 3.0);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[1.0,-2.5,3.0]");
        assert_eq!(serde_json::from_str::<Point3>(&s).unwrap(), p);
    }

    #[test]
    fn box_depth_and_distance() {
        let b = Aabb::cube(Point3::ORIGIN, 2.0);
        assert_eq!(b.depth(Point3::new(1.5, 0.0, 0.0)), 0.5);
        assert_eq!(b.distance_to(Point3::new(5.0, 0.0, 0.0)), 3.0);
        assert_eq!(b.volume(), 64.0);
    }
}
