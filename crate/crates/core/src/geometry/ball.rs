//! Exact volume of a convex polyhedron intersected with a ball.
//!
//! The polyhedron is written as a signed sum of cones from the ball center over
//! its face triangles. Each cone is reduced, through the foot of the
//! perpendicular on the face plane and then on each edge line, to signed cones
//! over right triangles. A right-triangle cone clipped by the ball is integrated
//! in polar angle: the inner part where the whole cone column lies inside the
//! ball is closed form, the rest uses adaptive Gauss-Legendre quadrature.

use std::f64::consts::PI;

use super::point::{det3, Point3};
use super::polyhedron::ConvexPolyhedron;

/// Solid angle subtended at the origin by the triangle (a, b, c), unsigned.
pub fn triangle_solid_angle(a: Point3, b: Point3, c: Point3) -> f64 {
    let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
    let num = det3(a, b, c).abs();
    let den = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
    2.0 * num.atan2(den)
}

/// Volume of `poly ∩ B(center, radius)`.
pub fn ball_intersection_volume(poly: &ConvexPolyhedron, center: Point3, radius: f64) -> f64 {
    if radius <= 0.0 || poly.face_count() < 4 {
        return 0.0;
    }
    let r2 = radius * radius;
    if poly.bbox().distance_to(center) >= radius {
        return 0.0;
    }
    let faces = poly.faces();
    if faces
        .iter()
        .all(|f| f.vertices.iter().all(|p| p.dist2(center) <= r2))
    {
        return poly.volume();
    }
    if faces.iter().all(|f| f.plane.signed_distance(center) <= -radius) {
        return 4.0 * PI / 3.0 * r2 * radius;
    }
    // A face plane at distance ≥ r with the center outside separates the ball.
    if faces.iter().any(|f| f.plane.signed_distance(center) >= radius) {
        return 0.0;
    }
    let mut total = 0.0;
    for f in faces {
        let h = -f.plane.signed_distance(center);
        if h.abs() >= radius {
            // The ball meets this face's plane nowhere, so the cone is a pure sector.
            let mut omega = 0.0;
            let p0 = f.vertices[0] - center;
            for w in f.vertices[1..].windows(2) {
                omega += triangle_solid_angle(p0, w[0] - center, w[1] - center);
            }
            total += h.signum() * omega * r2 * radius / 3.0;
            continue;
        }
        if h.abs() < 1e-15 {
            continue;
        }
        let foot = center + f.plane.normal * h;
        total += h.signum() * face_cone_volume(&f.vertices, f.plane.normal, foot, h.abs(), radius);
    }
    total.max(0.0)
}

/// Unsigned volume of the cone over the planar polygon `poly` (normal `n`) from an
/// apex at distance `h` above `foot`, intersected with the ball of radius `t`.
fn face_cone_volume(poly: &[Point3], n: Point3, foot: Point3, h: f64, t: f64) -> f64 {
    let mut s = 0.0;
    let m = poly.len();
    for i in 0..m {
        let (p, q) = (poly[i], poly[(i + 1) % m]);
        let e = q - p;
        let len = e.norm();
        if len < 1e-15 {
            continue;
        }
        let e = e / len;
        let g = p + e * (foot - p).dot(e);
        let gf = g - foot;
        let d = gf.norm();
        if d < 1e-15 {
            continue;
        }
        let side = gf.cross(e).dot(n).signum();
        let (up, uq) = ((p - g).dot(e), (q - g).dot(e));
        s += side * (right_signed(h, d, uq, t) - right_signed(h, d, up, t));
    }
    s
}

fn right_signed(h: f64, d: f64, u: f64, t: f64) -> f64 {
    u.signum() * right_cone_ball(h, d, u.abs(), t)
}

/// Volume of the cone from the apex over the right triangle with legs `d`
/// (from the foot of the apex on the plane) and `len` (perpendicular to it), at
/// height `h`, intersected with the ball of radius `t` about the apex.
pub fn right_cone_ball(h: f64, d: f64, len: f64, t: f64) -> f64 {
    if len <= 0.0 || d <= 0.0 || h <= 0.0 {
        return 0.0;
    }
    if h >= t {
        let a = Point3::new(0.0, 0.0, h);
        let b = Point3::new(d, 0.0, h);
        let c = Point3::new(d, len, h);
        return triangle_solid_angle(a, b, c) * t * t * t / 3.0;
    }
    let phi_max = (len / d).atan();
    let rho_k = (t * t - h * h).sqrt();
    let (closed, lo) = if d >= rho_k {
        (0.0, 0.0)
    } else {
        let phi_k = (d / rho_k).acos();
        if phi_k >= phi_max {
            return d * len * h / 6.0;
        }
        (d * d * h * phi_k.tan() / 6.0, phi_k)
    };
    let g = |phi: f64| {
        let k = d / (h * phi.cos());
        let zs = t / (1.0 + k * k).sqrt();
        k * k * zs * zs * zs / 6.0 + 0.5 * (t * t * (h - zs) - (h * h * h - zs * zs * zs) / 3.0)
    };
    closed + adaptive_gauss(&g, lo, phi_max, 1e-15 * t * t * t)
}

const GL_X: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_W: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

fn gauss8<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    r * GL_X.iter().zip(GL_W).map(|(x, w)| w * f(m + r * x)).sum::<f64>()
}

pub(crate) fn adaptive_gauss<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (l, r) = (gauss8(f, a, m), gauss8(f, m, b));
        if depth == 0 || (l + r - whole).abs() <= tol {
            l + r
        } else {
            rec(f, a, m, l, 0.5 * tol, depth - 1) + rec(f, m, b, r, 0.5 * tol, depth - 1)
        }
    }
    if b <= a {
        return 0.0;
    }
    rec(f, a, b, gauss8(f, a, b), tol, 40)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::point::Aabb;

    fn ball() -> f64 {
        4.0 * PI / 3.0
    }

    #[test]
    fn octant_and_hemisphere() {
        let b = ConvexPolyhedron::from_box(&Aabb::new(Point3::ORIGIN, Point3::new(5.0, 5.0, 5.0)));
        assert!((ball_intersection_volume(&b, Point3::ORIGIN, 1.0) - ball() / 8.0).abs() < 1e-13);
        let c = Point3::new(2.0, 2.0, 0.0);
        assert!((ball_intersection_volume(&b, c, 1.0) - ball() / 2.0).abs() < 1e-13);
        let e = Point3::new(2.0, 0.0, 0.0);
        assert!((ball_intersection_volume(&b, e, 1.0) - ball() / 4.0).abs() < 1e-13);
    }

    #[test]
    fn inscribed_and_contained() {
        let cube = ConvexPolyhedron::from_box(&Aabb::cube(Point3::ORIGIN, 1.0));
        assert!((ball_intersection_volume(&cube, Point3::ORIGIN, 1.0) - ball()).abs() < 1e-14);
        assert!((ball_intersection_volume(&cube, Point3::ORIGIN, 2.0) - 8.0).abs() < 1e-14);
        assert_eq!(ball_intersection_volume(&cube, Point3::new(3.0, 0.0, 0.0), 1.0), 0.0);
    }

    #[test]
    fn slab_cap() {
        // Cap of height 1 - a has volume π(1-a)²(2+a)/3.
        let slab = ConvexPolyhedron::from_box(&Aabb::new(
            Point3::new(-3.0, -3.0, 0.4),
            Point3::new(3.0, 3.0, 3.0),
        ));
        let a: f64 = 0.4;
        let cap = PI * (1.0 - a).powi(2) * (2.0 + a) / 3.0;
        assert!((ball_intersection_volume(&slab, Point3::ORIGIN, 1.0) - cap).abs() < 1e-13);
        // Off-center: the ball center sits outside the slab.
        let slab2 = slab.translate(Point3::new(0.3, -0.7, 0.0));
        assert!((ball_intersection_volume(&slab2, Point3::ORIGIN, 1.0) - cap).abs() < 1e-13);
    }

    #[test]
    fn square_column() {
        // |x|,|y| ≤ s: closed form via slices is awkward; compare with 2D radial quadrature.
        let s = 0.6;
        let col = ConvexPolyhedron::from_box(&Aabb::new(Point3::new(-s, -s, -2.0), Point3::new(s, s, 2.0)));
        let exact = ball_intersection_volume(&col, Point3::ORIGIN, 1.0);
        // ∫∫_{square} 2√(1-x²-y²) dx dy over the part inside the unit disk.
        let n = 2000;
        let h = 2.0 * s / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let x = -s + (i as f64 + 0.5) * h;
            let ymax = (1.0 - x * x).max(0.0).sqrt().min(s);
            // Exact in y: ∫ 2√(c²-y²) dy = y√(c²-y²) + c² asin(y/c).
            let c2: f64 = 1.0 - x * x;
            let c = c2.sqrt();
            let f = |y: f64| y * (c2 - y * y).max(0.0).sqrt() + c2 * (y / c).clamp(-1.0, 1.0).asin();
            acc += h * (f(ymax) - f(-ymax));
        }
        assert!((exact - acc).abs() < 1e-6, "{exact} vs {acc}");
    }
}
