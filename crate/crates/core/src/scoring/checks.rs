//! Admissibility and decoupling reports.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hf::sigma_hf;
use super::scheme::ScoreScheme;
use super::star::{near_neighbors, RegionRef};
use super::vor::gamma_tetra;
use super::compression;
use crate::constants::{delta_oct, HSIANG_RADIUS, TRUNC_RADIUS};
use crate::decomposition::{delaunay_star, vcells::MIN_PIECE_VOLUME, Decomposition};
use crate::error::Result;
use crate::geometry::{ball_intersection_volume, Aabb, ConvexPolyhedron, Plane, Point3, Region};

/// Tolerance on the weight identity for tetrahedra.
pub const TETRA_TOLERANCE: f64 = 1e-9;
/// Tolerance on the weight identity for polyhedral regions.
pub const REGION_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub region: RegionRef,
    pub residual: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub scheme: ScoreScheme,
    pub regions_checked: usize,
    pub max_residual: f64,
    pub violations: Vec<Violation>,
    /// Largest distance from a checked vertex to a vertex its star depends on.
    pub observed_locality: f64,
}

impl AdmissibilityReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

struct Acc {
    checked: usize,
    max: f64,
    violations: Vec<Violation>,
}

impl Acc {
    fn new() -> Self {
        Acc { checked: 0, max: 0.0, violations: Vec::new() }
    }

    fn add(&mut self, region: RegionRef, residual: f64, tol: f64, detail: impl FnOnce() -> String) {
        self.checked += 1;
        self.max = self.max.max(residual.abs());
        if !(residual.abs() <= tol) {
            self.violations.push(Violation { region, residual, detail: detail() });
        }
    }
}

/// Checks Σ_v σ(R, v) = (A·ρ(R) − B)·vol(R) for the regions around `vertices`.
///
/// For the hybrid scheme every D-system member (within the focus) is checked,
/// and each V-cell is checked for additivity over its clusters.
pub fn check_admissibility(dec: &Decomposition, scheme: &ScoreScheme, vertices: &[usize]) -> Result<AdmissibilityReport> {
    scheme.validate()?;
    let p = &dec.packing;
    let mut acc = Acc::new();
    let mut locality: f64 = 0.0;
    match *scheme {
        ScoreScheme::Hf => {
            let rows: Vec<Result<(usize, f64)>> = (0..dec.dsystem.len())
                .into_par_iter()
                .map(|id| {
                    let d = &dec.dsystem.tetra[id];
                    let mut s = 0.0;
                    for &v in &d.vertices {
                        s += sigma_hf(dec, id, v)?.value;
                    }
                    Ok((id, s - 4.0 * gamma_tetra(&d.tetra(p))?))
                })
                .collect();
            for r in rows {
                let (id, res) = r?;
                acc.add(RegionRef::DTetra(id), res, TETRA_TOLERANCE, || {
                    format!("weights of member {id} miss 4Γ by {res:e}")
                });
            }
            let cells: Vec<Result<(usize, f64, f64)>> = vertices
                .par_iter()
                .map(|&v| {
                    let cell = dec.v_cell(v)?;
                    let map = dec.planar_map(v)?;
                    let cl = dec.clusters(v, &map, &cell)?;
                    let parts: f64 = cl.clusters.iter().map(|c| compression(&c.vcell, dec)).sum();
                    let c = p.centers[v];
                    let mut far: f64 = 0.0;
                    for &id in dec.dsystem.incident(v) {
                        for &w in &dec.dsystem.tetra[id].vertices {
                            far = far.max(p.centers[w].dist(c));
                        }
                    }
                    for piece in &cell.region.pieces {
                        for q in piece.vertices() {
                            far = far.max(q.dist(c));
                        }
                    }
                    Ok((v, 4.0 * (compression(&cell.region, dec) - parts), far))
                })
                .collect();
            for r in cells {
                let (v, res, far) = r?;
                locality = locality.max(far);
                acc.add(RegionRef::VCell(v), res, REGION_TOLERANCE, || {
                    format!("V-cell of {v} is not additive over its clusters ({res:e})")
                });
            }
        }
        ScoreScheme::Voronoi { .. } => {
            for &v in vertices {
                acc.add(RegionRef::Voronoi(v), 0.0, REGION_TOLERANCE, String::new);
            }
        }
        ScoreScheme::FejesToth { t } => {
            for &w in vertices {
                let near = near_neighbors(dec, w, 2.0 + t);
                let self_weight = 1.0 - near.len() as f64 / 12.0;
                let mut s = self_weight;
                for &v in &near {
                    if near_neighbors(dec, v, 2.0 + t).contains(&w) {
                        s += 1.0 / 12.0;
                    }
                    locality = locality.max(p.centers[v].dist(p.centers[w]));
                }
                let res = s - 1.0;
                acc.add(RegionRef::Voronoi(w), res, REGION_TOLERANCE, || {
                    format!("averaging weights of the cell of {w} sum to {s}")
                });
            }
        }
        ScoreScheme::Hsiang => {
            for &w in vertices {
                let near = near_neighbors(dec, w, HSIANG_RADIUS);
                let mut s = 1.0 / (1.0 + near.len() as f64);
                for &v in &near {
                    s += 1.0 / (1.0 + near_neighbors(dec, v, HSIANG_RADIUS).len() as f64);
                    locality = locality.max(p.centers[v].dist(p.centers[w]));
                }
                let res = s - 1.0;
                acc.add(RegionRef::Voronoi(w), res, REGION_TOLERANCE, || {
                    format!("averaging weights of the cell of {w} sum to {s}; neighbor counts differ")
                });
            }
        }
        ScoreScheme::HalesDelaunay => {
            let mut stars = std::collections::HashMap::new();
            let mut need: BTreeSet<usize> = vertices.iter().copied().collect();
            for &v in vertices {
                let s = delaunay_star(p, &dec.index, v)?;
                for q in &s {
                    need.extend(q.iter().copied());
                }
                stars.insert(v, s);
            }
            for w in need {
                if let std::collections::hash_map::Entry::Vacant(e) = stars.entry(w) {
                    e.insert(delaunay_star(p, &dec.index, w)?);
                }
            }
            for &v in vertices {
                for q in &stars[&v] {
                    let shared = q.iter().filter(|w| stars[w].binary_search(q).is_ok()).count();
                    for &w in q {
                        locality = locality.max(p.centers[w].dist(p.centers[v]));
                    }
                    let res = (4 - shared) as f64;
                    acc.add(RegionRef::Delaunay(*q), res, 0.0, || {
                        format!("simplex {q:?} appears in {shared} of its four vertex stars")
                    });
                }
            }
        }
    }
    Ok(AdmissibilityReport {
        scheme: *scheme,
        regions_checked: acc.checked,
        max_residual: acc.max,
        violations: acc.violations,
        observed_locality: locality,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceDecoupling {
    pub face: usize,
    pub sides: usize,
    /// Volume of the symmetric difference between the V-cell part over the face
    /// and its reconstruction from the centers inside the face cone.
    pub symmetric_difference: f64,
    pub gamma_full: f64,
    pub gamma_trunc: f64,
}

impl FaceDecoupling {
    pub fn holds(&self) -> bool {
        self.symmetric_difference < 1e-6 && self.gamma_trunc >= self.gamma_full - 1e-9
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecouplingReport {
    pub vertex: usize,
    pub faces: Vec<FaceDecoupling>,
    pub skipped_nonconvex: usize,
}

impl DecouplingReport {
    pub fn ok(&self) -> bool {
        self.faces.iter().all(FaceDecoupling::holds)
    }
}

/// Half-width of the box in which face cones are built.
const CONE_BOX: f64 = 8.0;

/// Convex cone at `c` spanned by the directions `dirs`, cut to `clip`. The planes
/// face away from the direction `inside`.
fn cone(c: Point3, dirs: &[Point3], inside: Point3, clip: &Aabb) -> Option<ConvexPolyhedron> {
    let mut poly = ConvexPolyhedron::from_box(clip);
    for i in 0..dirs.len() {
        let n = dirs[i].cross(dirs[(i + 1) % dirs.len()]).normalized()?;
        let n = if n.dot(inside) > 0.0 { -n } else { n };
        poly = poly.clip(&Plane::new(n, c))?;
    }
    Some(poly)
}

fn region_overlap(a: &Region, b: &Region) -> f64 {
    let mut s = 0.0;
    for x in &a.pieces {
        for y in &b.pieces {
            s += x.intersection_volume(y);
        }
    }
    s
}

/// For each convex face of the planar map at `v`: rebuilds the V-cell part over
/// the face from the centers in the face cone alone, and compares the
/// compression of that part with its truncation at radius 1.255.
pub fn check_decoupling_truncation(dec: &Decomposition, v: usize) -> Result<DecouplingReport> {
    dec.packing.require_interior(v)?;
    dec.check_focus(v)?;
    let p = &dec.packing;
    let c = p.centers[v];
    let cell = dec.v_cell(v)?;
    let map = dec.planar_map(v)?;
    let clusters = dec.clusters(v, &map, &cell)?;
    let clip = Aabb::cube(c, CONE_BOX);
    let nearby: Vec<usize> = dec.index.within(c, 2.0 * CONE_BOX).into_iter().filter(|&w| w != v).collect();
    let mut faces = Vec::new();
    let mut skipped = 0;
    for cl in &clusters.clusters {
        let Some(face) = map.faces.get(cl.face) else { continue };
        if !face.convex {
            skipped += 1;
            continue;
        }
        let nodes = &map.cycles[face.cycles[0]];
        let dirs: Vec<Point3> = nodes.iter().map(|&k| map.dirs[k]).collect();
        let inside = dirs.iter().fold(Point3::ORIGIN, |a, &d| a + d);
        let Some(cf) = cone(c, &dirs, inside, &clip) else {
            skipped += 1;
            continue;
        };
        let mut local = cf.clone();
        for &w in &nearby {
            let x = p.centers[w];
            if cf.planes().all(|pl| pl.signed_distance(x) <= 1e-9) {
                if let Some(q) = local.clip(&Plane::bisector(c, x)) {
                    local = q;
                }
            }
        }
        let mut rebuilt = Region::new(Some(v), vec![local]);
        for &id in dec.dsystem.incident(v) {
            let d = &dec.dsystem.tetra[id];
            let ends: Vec<Point3> = d.vertices.iter().filter(|&&w| w != v).map(|&w| p.centers[w] - c).collect();
            let mid = ends.iter().fold(Point3::ORIGIN, |a, &d| a + d);
            if let Some(k) = cone(c, &ends, mid, &clip) {
                rebuilt.subtract(&k, MIN_PIECE_VOLUME);
            }
        }
        let a = cl.vcell.volume();
        let b = rebuilt.volume();
        let symmetric_difference = (a + b - 2.0 * region_overlap(&cl.vcell, &rebuilt)).max(0.0);
        let gamma_full = compression(&cl.vcell, dec);
        let d = delta_oct();
        // Inside radius 1.255 the V-cell meets no ball but its own.
        let gamma_trunc: f64 = cl
            .vcell
            .pieces
            .iter()
            .map(|q| ball_intersection_volume(q, c, 1.0) - d * ball_intersection_volume(q, c, TRUNC_RADIUS))
            .sum();
        faces.push(FaceDecoupling { face: cl.face, sides: face.sides, symmetric_difference, gamma_full, gamma_trunc });
    }
    Ok(DecouplingReport { vertex: v, faces, skipped_nonconvex: skipped })
}
