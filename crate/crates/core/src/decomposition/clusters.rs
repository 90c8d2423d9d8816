//! Clusters: the D-system tetrahedra and V-cell parts over each planar-map face.

use serde::{Deserialize, Serialize};

use super::planar_map::PlanarMap;
use super::vcells::{VCell, MIN_PIECE_VOLUME};
use super::Decomposition;
use crate::error::Result;
use crate::geometry::{det3, Plane, Point3, Region};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub face: usize,
    /// D-system indices of the incident tetrahedra over the face.
    pub tetra: Vec<usize>,
    /// Part of the V-cell inside the cone over the face.
    pub vcell: Region,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterSet {
    pub clusters: Vec<Cluster>,
    /// Incident tetrahedra whose cone is crossed by an arc.
    pub crossed_tetra: Vec<usize>,
    /// Spines whose quarters at the vertex fall into different faces.
    pub split_spines: Vec<usize>,
}

/// Coefficients of `d` in the basis (a, b, c).
fn cone_coords(a: Point3, b: Point3, c: Point3, d: Point3) -> [f64; 3] {
    let det = det3(a, b, c);
    [det3(d, b, c) / det, det3(a, d, c) / det, det3(a, b, d) / det]
}

fn arc_crosses_cone(map: &PlanarMap, arc: [usize; 2], corner: [Point3; 3]) -> bool {
    let (x, y) = (map.dirs[arc[0]], map.dirs[arc[1]]);
    let strictly_in = |d: Point3| cone_coords(corner[0], corner[1], corner[2], d).iter().all(|&t| t > 1e-9);
    if strictly_in(x) || strictly_in(y) || strictly_in((x + y) * 0.5) {
        return true;
    }
    // Crossing one side of the cone away from the corners.
    let m = x.cross(y);
    for (i, j) in [(0, 1), (1, 2), (2, 0)] {
        let (a, b) = (corner[i], corner[j]);
        let n = a.cross(b);
        let Some(q) = m.cross(n).normalized() else { continue };
        for q in [q, -q] {
            let on = |p0: Point3, p1: Point3, mm: Point3| {
                p0.cross(q).dot(mm) > 1e-9 && q.cross(p1).dot(mm) > 1e-9 && q.dot(p0 + p1) > 0.0
            };
            if on(x, y, m) && on(a, b, n) {
                return true;
            }
        }
    }
    false
}

pub(crate) fn clusters(dec: &Decomposition, v: usize, map: &PlanarMap, cell: &VCell) -> Result<ClusterSet> {
    let p = &dec.packing;
    let c = p.centers[v];
    let nf = map.faces.len().max(1);
    let mut clusters: Vec<Cluster> = (0..nf)
        .map(|f| Cluster { face: f, tetra: Vec::new(), vcell: Region::new(Some(v), Vec::new()) })
        .collect();
    let mut crossed = Vec::new();
    let mut spine_face: std::collections::HashMap<usize, usize> = Default::default();
    let mut split_spines = Vec::new();
    for &t in dec.dsystem.incident(v) {
        let d = &dec.dsystem.tetra[t];
        let tet = d.tetra(p);
        let f = map.locate(tet.centroid() - c);
        clusters[f].tetra.push(t);
        let corner: Vec<Point3> = d
            .vertices
            .iter()
            .filter(|&&w| w != v)
            .map(|&w| (p.centers[w] - c) / p.centers[w].dist(c))
            .collect();
        let corner = [corner[0], corner[1], corner[2]];
        if map.arcs.iter().any(|&a| arc_crosses_cone(map, a, corner)) {
            crossed.push(t);
        }
        if let Some(s) = d.spine() {
            match spine_face.get(&s) {
                Some(&g) if g != f => split_spines.push(s),
                None => {
                    spine_face.insert(s, f);
                }
                _ => {}
            }
        }
    }
    split_spines.sort_unstable();
    split_spines.dedup();
    let planes: Vec<Plane> = map
        .arcs
        .iter()
        .filter_map(|&[a, b]| map.dirs[a].cross(map.dirs[b]).normalized().map(|n| Plane::new(n, c)))
        .collect();
    for piece in &cell.region.pieces {
        let mut parts = vec![piece.clone()];
        for pl in &planes {
            let mut out = Vec::with_capacity(parts.len());
            for q in parts {
                let vs = q.vertices();
                let pos = vs.iter().any(|&x| pl.signed_distance(x) > 1e-10);
                let neg = vs.iter().any(|&x| pl.signed_distance(x) < -1e-10);
                if pos && neg {
                    let (a, b) = q.split(pl);
                    out.extend(a.into_iter().chain(b).filter(|r| r.volume() > MIN_PIECE_VOLUME));
                } else {
                    out.push(q);
                }
            }
            parts = out;
        }
        for q in parts {
            let f = if map.cycles.is_empty() { 0 } else { map.locate(q.center() - c) };
            clusters[f].vcell.pieces.push(q);
        }
    }
    Ok(ClusterSet { clusters, crossed_tetra: crossed, split_spines })
}
