//! Simplex mensuration: volumes, the Δ and A polynomials, solid angles,
//! circumcenters and Rogers simplices.

use super::point::{det3, Point3};
use super::tetra::Tetra;
use crate::error::{Error, Result};

/// Relative threshold below which 144·vol² (scaled by the longest squared edge cubed)
/// is treated as zero.
const DEGENERATE_DELTA: f64 = 1e-20;

/// Volume from the six squared edge lengths via the Cayley-Menger determinant,
/// evaluated by Gaussian elimination on the bordered 5×5 matrix.
pub fn cm_volume(t: &Tetra) -> Result<f64> {
    let x = t.squared_lengths();
    let v2 = cm_determinant(&x) / 288.0;
    let scale = x.iter().cloned().fold(0.0, f64::max).powi(3);
    if !(v2 > DEGENERATE_DELTA * scale / 144.0) {
        return Err(Error::Degenerate("tetrahedron"));
    }
    Ok(v2.sqrt())
}

fn cm_determinant(x: &[f64; 6]) -> f64 {
    // Vertex pairs for x1..x6: (0,1) (0,2) (0,3) (2,3) (1,3) (1,2).
    let d = |i: usize, j: usize| -> f64 {
        match (i.min(j), i.max(j)) {
            (a, b) if a == b => 0.0,
            (0, 1) => x[0],
            (0, 2) => x[1],
            (0, 3) => x[2],
            (2, 3) => x[3],
            (1, 3) => x[4],
            (1, 2) => x[5],
            _ => unreachable!(),
        }
    };
    let mut m = [[0.0f64; 5]; 5];
    for i in 0..5 {
        for j in 0..5 {
            m[i][j] = match (i, j) {
                (0, 0) => 0.0,
                (0, _) | (_, 0) => 1.0,
                _ => d(i - 1, j - 1),
            };
        }
    }
    let mut det = 1.0;
    for col in 0..5 {
        let piv = (col..5)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        if m[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= m[col][col];
        for r in col + 1..5 {
            let f = m[r][col] / m[col][col];
            for c in col..5 {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    det
}

/// Δ(x1..x6) = 144·vol², in the symmetric form.
pub fn delta(x: [f64; 6]) -> f64 {
    let [x1, x2, x3, x4, x5, x6] = x;
    x1 * x4 * (-x1 + x2 + x3 - x4 + x5 + x6)
        + x2 * x5 * (x1 - x2 + x3 + x4 - x5 + x6)
        + x3 * x6 * (x1 + x2 - x3 + x4 + x5 - x6)
        - x2 * x3 * x4
        - x1 * x3 * x5
        - x1 * x2 * x6
        - x4 * x5 * x6
}

/// The A polynomial of the solid angle formula at vertex v0.
pub fn a_coeff(l: [f64; 6]) -> f64 {
    let [l1, l2, l3, l4, l5, l6] = l;
    l1 * l2 * l3
        + 0.5 * l1 * (l2 * l2 + l3 * l3 - l4 * l4)
        + 0.5 * l2 * (l1 * l1 + l3 * l3 - l5 * l5)
        + 0.5 * l3 * (l1 * l1 + l2 * l2 - l6 * l6)
}

/// Solid angle at v0 of the tetrahedron with the given edge lengths, in [0, 2π).
pub fn solid_angle_from_lengths(l: [f64; 6]) -> Result<f64> {
    let x = l.map(|v| v * v);
    let d = delta(x);
    let scale = x.iter().cloned().fold(0.0, f64::max).powi(3);
    if !(d > DEGENERATE_DELTA * scale) {
        return Err(Error::Degenerate("tetrahedron"));
    }
    // arccot(2A/√Δ) on the branch [0, π].
    Ok(2.0 * d.sqrt().atan2(2.0 * a_coeff(l)))
}

/// Solid angle of `t` at vertex `k`.
pub fn solid_angle(t: &Tetra, k: usize) -> Result<f64> {
    solid_angle_from_lengths(t.lengths_from(k))
}

/// Circumcenter and circumradius.
pub fn circumcenter(t: &Tetra) -> Result<(Point3, f64)> {
    let [v0, v1, v2, v3] = *t.vertices();
    let (a, b, c) = (v1 - v0, v2 - v0, v3 - v0);
    let det = det3(a, b, c);
    let scale = a.norm2().max(b.norm2()).max(c.norm2()).powf(1.5);
    if !(det.abs() > 1e-12 * scale) {
        return Err(Error::Degenerate("tetrahedron"));
    }
    let num = b.cross(c) * a.norm2() + c.cross(a) * b.norm2() + a.cross(b) * c.norm2();
    let off = num / (2.0 * det);
    Ok((v0 + off, off.norm()))
}

/// Circumcenter of a triangle in space.
pub fn triangle_circumcenter(p: Point3, q: Point3, r: Point3) -> Result<Point3> {
    let a = p - r;
    let b = q - r;
    let axb = a.cross(b);
    let n2 = axb.norm2();
    if !(n2 > 1e-24 * a.norm2().max(b.norm2()).powi(2)) {
        return Err(Error::Degenerate("triangle"));
    }
    Ok(r + (b * a.norm2() - a * b.norm2()).cross(axb) / (2.0 * n2))
}

/// Radius of the circle through three points.
pub fn face_circumradius(p: Point3, q: Point3, r: Point3) -> Result<f64> {
    Ok(triangle_circumcenter(p, q, r)?.dist(p))
}

/// The orthoscheme R(a,b,c): distances from its apex to an edge midpoint (a),
/// a face circumcenter (b) and the circumcenter (c).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RogersShape {
    a: f64,
    b: f64,
    c: f64,
}

impl RogersShape {
    /// Accepts 1 ≤ a ≤ b ≤ c up to an absolute slack of 1e-9, clamping inside it.
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        const SLACK: f64 = 1e-9;
        let ok = a.is_finite() && b.is_finite() && c.is_finite();
        if !ok || a < 1.0 - SLACK || b < a - SLACK || c < b - SLACK {
            return Err(Error::RogersOrdering { a, b, c });
        }
        let b = b.max(a);
        let c = c.max(b);
        Ok(RogersShape { a, b, c })
    }

    pub fn abc(&self) -> (f64, f64, f64) {
        (self.a, self.b, self.c)
    }

    /// Edge lengths of R(a,b,c) in the l1..l6 order.
    pub fn edge_lengths(&self) -> [f64; 6] {
        let (a, b, c) = (self.a, self.b, self.c);
        [
            a,
            b,
            c,
            (c * c - b * b).sqrt(),
            (c * c - a * a).sqrt(),
            (b * b - a * a).sqrt(),
        ]
    }

    /// Solid angle at the apex; zero when the simplex is flat.
    pub fn solid_angle(&self) -> f64 {
        solid_angle_from_lengths(self.edge_lengths()).unwrap_or(0.0)
    }
}

/// vol R(a,b,c) = a·√(b²−a²)·√(c²−b²)/6.
pub fn rogers_volume(s: &RogersShape) -> f64 {
    let (a, b, c) = s.abc();
    a * (b * b - a * a).sqrt() * (c * c - b * b).sqrt() / 6.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::tetra::tests::{corner, regular};

    #[test]
    fn regular_values() {
        let t = regular();
        let v = cm_volume(&t).unwrap();
        assert!((v - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-14);
        assert!((delta([4.0; 6]) - 128.0).abs() < 1e-12);
        assert!((a_coeff([2.0; 6]) - 20.0).abs() < 1e-14);
        // A is homogeneous of degree 3: A(1,…,1) = 20/8.
        assert!((a_coeff([1.0; 6]) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn corner_values() {
        let t = corner();
        assert!((cm_volume(&t).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((solid_angle(&t, 0).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
        let (c, r) = circumcenter(&t).unwrap();
        assert!(c.dist(Point3::new(0.5, 0.5, 0.5)) < 1e-15);
        assert!((r - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn coplanar_is_degenerate() {
        let t = Tetra::new([
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(1.0, 1.0, 0.0),
        ]);
        assert!(matches!(cm_volume(&t), Err(Error::Degenerate(_))));
        assert!(solid_angle(&t, 0).is_err());
        assert!(circumcenter(&t).is_err());
        assert!(delta(t.squared_lengths()).abs() < 1e-12);
    }

    #[test]
    fn a_vanishes_with_l1() {
        // With v1 = v0 the opposite lengths coincide: l5 = l3 and l6 = l2.
        assert!(a_coeff([0.0, 1.3, 1.7, 1.1, 1.7, 1.3]).abs() < 1e-15);
    }

    #[test]
    fn face_circumradii() {
        let s3 = 3f64.sqrt();
        let r = face_circumradius(Point3::ORIGIN, Point3::new(2.0, 0.0, 0.0), Point3::new(1.0, s3, 0.0)).unwrap();
        assert!((r - 2.0 / s3).abs() < 1e-15);
        let r = face_circumradius(Point3::ORIGIN, Point3::new(2.0, 0.0, 0.0), Point3::new(0.0, 2.0, 0.0)).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
        let e = face_circumradius(Point3::ORIGIN, Point3::new(1.0, 1.0, 1.0), Point3::new(2.0, 2.0, 2.0));
        assert!(e.is_err());
    }

    #[test]
    fn rogers_examples() {
        let s = RogersShape::new(1.0, 2f64.sqrt(), 3f64.sqrt()).unwrap();
        assert!((rogers_volume(&s) - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(rogers_volume(&RogersShape::new(1.0, 1.0, 7.0).unwrap()), 0.0);
        let s = RogersShape::new(1.0, 2.0 / 3f64.sqrt(), 1.5f64.sqrt()).unwrap();
        assert!((rogers_volume(&s) - 0.039283710065919).abs() < 1e-12);
        assert!(RogersShape::new(0.5, 1.0, 2.0).is_err());
        assert!(RogersShape::new(1.0, 2.0, 1.5).is_err());
    }
}
