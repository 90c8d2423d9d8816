//! Voronoi measures of a tetrahedron at a vertex.
//!
//! The piece of a tetrahedron nearer to one vertex than to the others is a
//! signed sum of six orthoschemes R(a,b,c), one per (edge, face) flag at the
//! vertex. A flag counts negatively when its orthoscheme is oriented against
//! the tetrahedron, which happens for obtuse faces and when the circumcenter
//! leaves the cone at the vertex.

use serde::{Deserialize, Serialize};

use crate::constants::delta_oct;
use crate::error::{Error, Result};
use crate::geometry::{
    ball_intersection_volume, det3, face_circumradius, right_cone_ball, rogers_volume,
    triangle_circumcenter, Plane,
    RogersShape, Tetra, EPS_GEO,
};

/// One orthoscheme of the flag decomposition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RogersFlag {
    pub sign: f64,
    pub shape: RogersShape,
}

/// The six signed flags of `t` at vertex `k`.
pub fn rogers_flags(t: &Tetra, k: usize) -> Result<Vec<RogersFlag>> {
    let v = t.vertex(k);
    let (cc, _) = t.circumcenter()?;
    let others: Vec<usize> = (1..4).map(|i| (k + i) % 4).collect();
    let mut out = Vec::with_capacity(6);
    for &j in &others {
        for &m in &others {
            if m == j {
                continue;
            }
            let o = others.iter().copied().find(|&x| x != j && x != m).unwrap();
            let (vj, vm, vo) = (t.vertex(j), t.vertex(m), t.vertex(o));
            let mid = v.midpoint(vj);
            let fc = triangle_circumcenter(v, vj, vm)?;
            let shape = RogersShape::new(v.dist(mid), v.dist(fc), v.dist(cc))?;
            let flag = det3(mid - v, fc - v, cc - v);
            let frame = det3(vj - v, vm - v, vo - v);
            let scale = v.dist(cc).powi(3).max(1.0);
            let sign = if flag.abs() <= 1e-12 * scale {
                0.0
            } else {
                flag.signum() * frame.signum()
            };
            out.push(RogersFlag { sign, shape });
        }
    }
    Ok(out)
}

/// Compression Σ Sol/3 − δ_oct·vol of a simplex whose vertex balls meet it only
/// in their corner sectors.
pub fn gamma_tetra(t: &Tetra) -> Result<f64> {
    let mut sol = 0.0;
    for k in 0..4 {
        sol += t.solid_angle(k)?;
    }
    Ok(sol / 3.0 - delta_oct() * t.volume())
}

/// The Voronoi measure: four times the compression of the part of `t` nearer to
/// vertex `k`, continued through the signed flag sum when the circumcenter
/// leaves the cone at `k`.
pub fn vor(t: &Tetra, k: usize) -> Result<f64> {
    let d = delta_oct();
    let s: f64 = rogers_flags(t, k)?
        .iter()
        .map(|f| f.sign * (f.shape.solid_angle() / 3.0 - d * rogers_volume(&f.shape)))
        .sum();
    Ok(4.0 * s)
}

/// Whether the circumcenter of `t` lies in the closed cone spanned at vertex `k`.
pub fn circumcenter_in_cone(t: &Tetra, k: usize) -> Result<bool> {
    let (cc, _) = t.circumcenter()?;
    let l = t.barycentric(cc)?;
    Ok((0..4).filter(|&i| i != k).all(|i| l[i] >= -EPS_GEO))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruncBranch {
    /// Circumcenter inside the cone: signed orthoschemes cut by the ball.
    Flags,
    /// Circumcenter outside the cone: the Voronoi piece of the tetrahedron itself.
    Piece,
}

/// Truncated Voronoi measure: four times the compression of the Voronoi piece at
/// vertex `k` intersected with the ball of the given radius about it.
pub fn vor_trunc(t: &Tetra, k: usize, radius: f64) -> Result<(f64, TruncBranch)> {
    if !(radius >= 0.0) {
        return Err(Error::InvalidInput(format!("truncation radius {radius}")));
    }
    let d = delta_oct();
    let inner = radius.min(1.0);
    if circumcenter_in_cone(t, k)? {
        let s: f64 = rogers_flags(t, k)?
            .iter()
            .map(|f| {
                let (a, b, c) = f.shape.abc();
                let (leg, len) = ((b * b - a * a).max(0.0).sqrt(), (c * c - b * b).max(0.0).sqrt());
                let cone = |r: f64| right_cone_ball(a, leg, len, r);
                f.sign * (cone(inner) - d * cone(radius))
            })
            .sum();
        return Ok((4.0 * s, TruncBranch::Flags));
    }
    let v = t.vertex(k);
    let mut piece = Some(t.to_polyhedron());
    for i in (0..4).filter(|&i| i != k) {
        piece = piece.and_then(|q| q.clip(&Plane::bisector(v, t.vertex(i))));
    }
    let value = match piece {
        Some(q) => 4.0 * (ball_intersection_volume(&q, v, inner) - d * ball_intersection_volume(&q, v, radius)),
        None => 0.0,
    };
    Ok((value, TruncBranch::Piece))
}

/// Largest circumradius of the two faces through the spine `(s0, s1)`.
pub fn eta_plus(t: &Tetra, s0: usize, s1: usize) -> Result<f64> {
    if s0 == s1 || s0 > 3 || s1 > 3 {
        return Err(Error::InvalidInput(format!("spine ({s0}, {s1})")));
    }
    let mut eta: f64 = 0.0;
    for o in (0..4).filter(|&o| o != s0 && o != s1) {
        eta = eta.max(face_circumradius(t.vertex(s0), t.vertex(s1), t.vertex(o))?);
    }
    Ok(eta)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuBranch {
    Gamma,
    Vor,
}

/// Quarter weight: Γ(T) when both spine faces have circumradius at most √2,
/// otherwise the Voronoi measure at `k`.
pub fn mu(t: &Tetra, spine: [usize; 2], k: usize) -> Result<(f64, MuBranch)> {
    if eta_plus(t, spine[0], spine[1])? <= 2f64.sqrt() + EPS_GEO {
        Ok((gamma_tetra(t)?, MuBranch::Gamma))
    } else {
        Ok((vor(t, k)?, MuBranch::Vor))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::pt;
    use crate::geometry::tetra::tests::regular;

    #[test]
    fn regular_tetra_scores_pt_at_every_vertex() {
        let t = regular();
        assert!((gamma_tetra(&t).unwrap() - pt()).abs() < 1e-12);
        for k in 0..4 {
            assert!((vor(&t, k).unwrap() - pt()).abs() < 1e-12);
            let flags = rogers_flags(&t, k).unwrap();
            assert!(flags.iter().all(|f| f.sign == 1.0));
        }
    }

    #[test]
    fn vor_sums_to_four_gamma_with_obtuse_faces() {
        let t = Tetra::from_edge_lengths([2.0, 2.2, 2.9, 2.8, 2.1, 2.3]).unwrap();
        let s: f64 = (0..4).map(|k| vor(&t, k).unwrap()).sum();
        assert!((s - 4.0 * gamma_tetra(&t).unwrap()).abs() < 1e-10);
        assert!((0..4).any(|k| !circumcenter_in_cone(&t, k).unwrap()));
    }

    #[test]
    fn truncation_beyond_circumradius_is_vor() {
        let t = regular();
        let (v, b) = vor_trunc(&t, 0, 1.255).unwrap();
        assert_eq!(b, TruncBranch::Flags);
        assert!((v - pt()).abs() < 1e-10);
        assert_eq!(vor_trunc(&t, 0, 0.0).unwrap().0, 0.0);
    }

    #[test]
    fn flag_and_piece_truncations_agree_when_circumcenter_inside() {
        let t = Tetra::from_edge_lengths([2.3, 2.1, 2.4, 2.2, 2.45, 2.05]).unwrap();
        let (cc, _) = t.circumcenter().unwrap();
        assert!(t.contains(cc, 0.0));
        for k in 0..4 {
            let v = t.vertex(k);
            let mut q = t.to_polyhedron();
            for i in (0..4).filter(|&i| i != k) {
                q = q.clip(&Plane::bisector(v, t.vertex(i))).unwrap();
            }
            for r in [1.1, 1.255, 1.4] {
                let piece = 4.0 * (ball_intersection_volume(&q, v, 1.0) - delta_oct() * ball_intersection_volume(&q, v, r));
                let (flags, _) = vor_trunc(&t, k, r).unwrap();
                assert!((piece - flags).abs() < 1e-10, "k={k} r={r}: {piece} vs {flags}");
            }
        }
    }

    #[test]
    fn quarter_with_right_spine_faces_takes_gamma_branch() {
        let s = 8f64.sqrt();
        let t = Tetra::from_edge_lengths([s, 2.0, 2.0, 2.0, 2.0, 2.0]).unwrap();
        assert!((eta_plus(&t, 0, 1).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let (g, b) = mu(&t, [0, 1], 0).unwrap();
        assert_eq!(b, MuBranch::Gamma);
        assert!(g.abs() < 1e-12);
        let stretched = Tetra::from_edge_lengths([s, 2.0, 2.2, 2.0, 2.0, 2.0]).unwrap();
        assert_eq!(mu(&stretched, [0, 1], 0).unwrap().1, MuBranch::Vor);
    }
}
