//! Delaunay star of a vertex with a consistent tie-break for cospherical points.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::Tetra;
use crate::packing::{NeighborIndex, Packing};

/// Empty spheres of a saturated packing have radius at most 2; the slack covers
/// saturation certified on a grid.
const MAX_RADIUS: f64 = 2.1;
const TIE: f64 = 1e-9;

/// Deterministic pseudo-random height in [0, 1) used to lift cospherical points.
fn height(i: usize) -> f64 {
    let mut z = (i as u64).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64
}

/// Tetrahedra of the Delaunay triangulation having `v` as a vertex, as ascending
/// index quadruples. Cospherical sets are split by the regular triangulation
/// for heights [`height`], which is consistent across vertices.
pub fn delaunay_star(p: &Packing, idx: &NeighborIndex, v: usize) -> Result<Vec<[usize; 4]>> {
    let c = p.centers[v];
    let nb: Vec<usize> = idx.within(c, 2.0 * MAX_RADIUS).into_iter().filter(|&w| w != v).collect();
    let mut out = Vec::new();
    let mut solid = 0.0;
    for (x, &a) in nb.iter().enumerate() {
        for (y, &b) in nb.iter().enumerate().skip(x + 1) {
            if p.centers[a].dist(p.centers[b]) > 2.0 * MAX_RADIUS {
                continue;
            }
            for &d in &nb[y + 1..] {
                let t = Tetra::new([c, p.centers[a], p.centers[b], p.centers[d]]);
                let Ok((x0, r)) = t.circumcenter() else { continue };
                if r > MAX_RADIUS {
                    continue;
                }
                let quad = [v, a, b, d];
                let mut ok = true;
                for &e in &nb {
                    if quad.contains(&e) {
                        continue;
                    }
                    let de = p.centers[e].dist(x0);
                    if de < r - TIE {
                        ok = false;
                        break;
                    }
                    if de <= r + TIE {
                        let Ok(l) = t.barycentric(p.centers[e]) else { ok = false; break };
                        let interp: f64 = quad.iter().zip(l).map(|(&q, li)| li * height(q)).sum();
                        if height(e) <= interp {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    solid += t.solid_angle(0).unwrap_or(0.0);
                    let mut q = quad;
                    q.sort_unstable();
                    out.push(q);
                }
            }
        }
    }
    if (solid - 4.0 * PI).abs() > 1e-6 {
        return Err(Error::Anomaly(format!(
            "Delaunay star at vertex {v} covers solid angle {solid}, expected 4π"
        )));
    }
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packing::gen_fcc;

    #[test]
    fn fcc_star_splits_octahedra() {
        let p = gen_fcc(2).unwrap();
        let star = delaunay_star(&p, &p.index(), 0).unwrap();
        // 8 regular tetrahedra plus the pieces of 6 split octahedra meeting at v.
        let regular = star
            .iter()
            .filter(|q| {
                let t = Tetra::new(q.map(|i| p.centers[i]));
                t.edge_lengths().iter().all(|l| (l - 2.0).abs() < 1e-9)
            })
            .count();
        assert_eq!(regular, 8);
        assert!(star.len() > 8);
    }
}
