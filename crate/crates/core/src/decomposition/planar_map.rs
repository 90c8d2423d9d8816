//! The planar map at a vertex: neighbors within 2.51 projected to the unit
//! sphere, joined by great-circle arcs when they are within 2.51 of each other.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::simplices::is_short;
use crate::constants::QR_EDGE;
use crate::error::{Error, Result};
use crate::geometry::{Point3, EPS_GEO};
use crate::packing::{NeighborIndex, Packing};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapFace {
    /// Boundary cycles (indices into [`PlanarMap::cycles`]).
    pub cycles: Vec<usize>,
    /// Solid angle of the face.
    pub area: f64,
    /// One simple boundary cycle turning left at every corner, area below 2π.
    pub convex: bool,
    /// Number of boundary corners (counted with multiplicity).
    pub sides: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarMap {
    pub vertex: usize,
    /// Packing indices of the nodes.
    pub nodes: Vec<usize>,
    /// Unit directions from the vertex to the nodes.
    pub dirs: Vec<Point3>,
    /// Arcs as pairs of node positions, ascending.
    pub arcs: Vec<[usize; 2]>,
    /// Neighbors of each node, counter-clockwise seen from outside the sphere.
    pub rotation: Vec<Vec<usize>>,
    /// Boundary walks as node sequences; an isolated node forms its own cycle.
    pub cycles: Vec<Vec<usize>>,
    pub faces: Vec<MapFace>,
    /// Pairs of arcs meeting away from their endpoints.
    pub crossings: Vec<[[usize; 2]; 2]>,
    cycle_face: Vec<usize>,
    half_edge_cycle: HashMap<(usize, usize), usize>,
    isolated_cycle: HashMap<usize, usize>,
    component: Vec<usize>,
}

fn tangent_basis(n: Point3) -> (Point3, Point3) {
    let u = n.any_orthogonal();
    (u, n.cross(u))
}

fn angle_about(n: Point3, basis: (Point3, Point3), d: Point3) -> f64 {
    let t = d - n * n.dot(d);
    t.dot(basis.1).atan2(t.dot(basis.0)).rem_euclid(TAU)
}

/// Strictly interior point of the minor arc from `a` to `b`.
fn on_arc(a: Point3, b: Point3, q: Point3) -> bool {
    let m = a.cross(b);
    a.cross(q).dot(m) > 1e-12 && q.cross(b).dot(m) > 1e-12 && q.dot(a + b) > 0.0
}

pub fn planar_map(p: &Packing, idx: &NeighborIndex, v: usize) -> Result<PlanarMap> {
    let c = p.centers[v];
    let nodes: Vec<usize> = idx
        .within(c, QR_EDGE + EPS_GEO)
        .into_iter()
        .filter(|&w| w != v)
        .collect();
    let dirs: Vec<Point3> = nodes.iter().map(|&w| (p.centers[w] - c) / p.centers[w].dist(c)).collect();
    let n = nodes.len();
    let mut arcs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if is_short(p.centers[nodes[a]].dist(p.centers[nodes[b]])) {
                arcs.push([a, b]);
            }
        }
    }
    let mut crossings = Vec::new();
    for (i, e) in arcs.iter().enumerate() {
        for f in &arcs[i + 1..] {
            if e.iter().any(|x| f.contains(x)) {
                continue;
            }
            let l = dirs[e[0]].cross(dirs[e[1]]).cross(dirs[f[0]].cross(dirs[f[1]]));
            let Some(q) = l.normalized() else { continue };
            for q in [q, -q] {
                if on_arc(dirs[e[0]], dirs[e[1]], q) && on_arc(dirs[f[0]], dirs[f[1]], q) {
                    crossings.push([*e, *f]);
                }
            }
        }
    }
    let mut adj = vec![Vec::new(); n];
    for &[a, b] in &arcs {
        adj[a].push(b);
        adj[b].push(a);
    }
    let bases: Vec<_> = dirs.iter().map(|&d| tangent_basis(d)).collect();
    let ang = |at: usize, to: usize| angle_about(dirs[at], bases[at], dirs[to]);
    let rotation: Vec<Vec<usize>> = (0..n)
        .map(|b| {
            let mut r = adj[b].clone();
            r.sort_by(|&x, &y| ang(b, x).total_cmp(&ang(b, y)));
            r
        })
        .collect();
    let next = |a: usize, b: usize| -> usize {
        let r = &rotation[b];
        let k = r.iter().position(|&x| x == a).unwrap();
        r[(k + r.len() - 1) % r.len()]
    };

    // Components.
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(c: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while c[r] != r {
            r = c[r];
        }
        let mut y = x;
        while c[y] != r {
            let t = c[y];
            c[y] = r;
            y = t;
        }
        r
    }
    for &[a, b] in &arcs {
        let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
        comp[ra] = rb;
    }
    let roots: Vec<usize> = (0..n).map(|x| find(&mut comp, x)).collect();
    let mut comp_ids: HashMap<usize, usize> = HashMap::new();
    let component: Vec<usize> = roots
        .iter()
        .map(|r| {
            let k = comp_ids.len();
            *comp_ids.entry(*r).or_insert(k)
        })
        .collect();
    let ncomp = comp_ids.len();

    // Boundary cycles and their total turning.
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut turning: Vec<f64> = Vec::new();
    let mut convex_turns: Vec<bool> = Vec::new();
    let mut half_edge_cycle: HashMap<(usize, usize), usize> = HashMap::new();
    let mut isolated_cycle: HashMap<usize, usize> = HashMap::new();
    for a in 0..n {
        if adj[a].is_empty() {
            isolated_cycle.insert(a, cycles.len());
            cycles.push(vec![a]);
            turning.push(-TAU);
            convex_turns.push(false);
            continue;
        }
        for &b in &adj[a] {
            if half_edge_cycle.contains_key(&(a, b)) {
                continue;
            }
            let id = cycles.len();
            let mut walk = Vec::new();
            let mut turn = 0.0;
            let mut left = true;
            let (mut x, mut y) = (a, b);
            loop {
                half_edge_cycle.insert((x, y), id);
                walk.push(x);
                let z = next(x, y);
                let mut interior = (ang(y, x) - ang(y, z)).rem_euclid(TAU);
                if z == x || interior == 0.0 {
                    interior = TAU;
                }
                left &= interior < PI;
                turn += PI - interior;
                x = y;
                y = z;
                if (x, y) == (a, b) {
                    break;
                }
            }
            cycles.push(walk);
            turning.push(turn);
            convex_turns.push(left);
        }
    }

    let mut map = PlanarMap {
        vertex: v,
        nodes,
        dirs,
        arcs,
        rotation,
        cycles,
        faces: Vec::new(),
        crossings,
        cycle_face: Vec::new(),
        half_edge_cycle,
        isolated_cycle,
        component,
    };

    // Group cycles of different components that bound a common face.
    let nc = map.cycles.len();
    let mut parent: Vec<usize> = (0..nc).collect();
    if ncomp > 1 {
        let rep: Vec<Point3> = (0..ncomp)
            .map(|k| map.dirs[map.component.iter().position(|&c| c == k).unwrap()])
            .collect();
        // around[k][j]: the cycle of component k whose side contains component j.
        let mut around = vec![vec![usize::MAX; ncomp]; ncomp];
        for k in 0..ncomp {
            for j in 0..ncomp {
                if j != k {
                    around[k][j] = map.locate_cycle(rep[j], Some(k));
                }
            }
        }
        for k in 0..ncomp {
            for j in k + 1..ncomp {
                let separated = (0..ncomp)
                    .any(|m| m != k && m != j && around[m][k] != around[m][j]);
                if !separated {
                    let (a, b) = (find(&mut parent, around[k][j]), find(&mut parent, around[j][k]));
                    parent[a] = b;
                }
            }
        }
    }
    let mut face_of_root: HashMap<usize, usize> = HashMap::new();
    let mut cycle_face = vec![0; nc];
    let mut faces: Vec<MapFace> = Vec::new();
    for cy in 0..nc {
        let r = find(&mut parent, cy);
        let f = *face_of_root.entry(r).or_insert_with(|| {
            faces.push(MapFace { cycles: Vec::new(), area: 0.0, convex: false, sides: 0 });
            faces.len() - 1
        });
        cycle_face[cy] = f;
        faces[f].cycles.push(cy);
    }
    if n == 0 {
        faces.push(MapFace { cycles: Vec::new(), area: 2.0 * TAU, convex: false, sides: 0 });
    }
    for f in faces.iter_mut() {
        if f.cycles.is_empty() {
            continue;
        }
        let k = f.cycles.len() as f64;
        let turns: f64 = f.cycles.iter().map(|&c| turning[c]).sum();
        f.area = TAU * (2.0 - k) - turns;
        f.sides = f.cycles.iter().map(|&c| if map.cycles[c].len() == 1 && map.isolated_cycle.contains_key(&map.cycles[c][0]) { 0 } else { map.cycles[c].len() }).sum();
        let c0 = f.cycles[0];
        let simple = {
            let mut s = map.cycles[c0].clone();
            s.sort_unstable();
            s.windows(2).all(|w| w[0] != w[1])
        };
        f.convex = f.cycles.len() == 1 && simple && convex_turns[c0] && f.area < TAU;
    }
    map.faces = faces;
    map.cycle_face = cycle_face;
    let total: f64 = map.faces.iter().map(|f| f.area).sum();
    if map.crossings.is_empty() && (total - 2.0 * TAU).abs() > 1e-6 {
        return Err(Error::Anomaly(format!(
            "planar map at vertex {v}: face areas sum to {total}, expected 4π"
        )));
    }
    Ok(map)
}

impl PlanarMap {
    /// Face containing the direction `d` (need not be normalized).
    pub fn locate(&self, d: Point3) -> usize {
        if self.cycles.is_empty() {
            return 0;
        }
        self.cycle_face[self.locate_cycle(d / d.norm(), None)]
    }

    /// Boundary cycle of the face containing `y`, considering only the features
    /// of component `only` when given.
    fn locate_cycle(&self, y: Point3, only: Option<usize>) -> usize {
        let keep = |a: usize| only.map_or(true, |k| self.component[a] == k);
        let mut best = f64::INFINITY;
        let mut hit: Option<(usize, usize)> = None;
        let mut node_hit: Option<usize> = None;
        for &[a, b] in &self.arcs {
            if !keep(a) {
                continue;
            }
            let m = match self.dirs[a].cross(self.dirs[b]).normalized() {
                Some(m) => m,
                None => continue,
            };
            let s = y.dot(m);
            let proj = y - m * s;
            let Some(q) = proj.normalized() else { continue };
            if on_arc(self.dirs[a], self.dirs[b], q) {
                let d = s.abs().asin();
                if d < best {
                    best = d;
                    hit = Some(if s > 0.0 { (a, b) } else { (b, a) });
                    node_hit = None;
                }
            }
        }
        for (a, &d) in self.dirs.iter().enumerate() {
            if !keep(a) {
                continue;
            }
            let ang = y.dot(d).clamp(-1.0, 1.0).acos();
            if ang < best {
                best = ang;
                node_hit = Some(a);
                hit = None;
            }
        }
        if let Some(a) = node_hit {
            if let Some(&cy) = self.isolated_cycle.get(&a) {
                return cy;
            }
            let n = self.dirs[a];
            let basis = tangent_basis(n);
            let phi = angle_about(n, basis, y);
            let r = &self.rotation[a];
            let angs: Vec<f64> = r.iter().map(|&c| angle_about(n, basis, self.dirs[c])).collect();
            let k = (0..r.len())
                .filter(|&i| angs[i] <= phi)
                .max_by(|&i, &j| angs[i].total_cmp(&angs[j]))
                .unwrap_or_else(|| (0..r.len()).max_by(|&i, &j| angs[i].total_cmp(&angs[j])).unwrap());
            return self.half_edge_cycle[&(a, r[k])];
        }
        self.half_edge_cycle[&hit.expect("map has features")]
    }

    /// Numbers of faces by side count, for faces with a single boundary cycle.
    pub fn face_histogram(&self) -> std::collections::BTreeMap<usize, usize> {
        let mut h = std::collections::BTreeMap::new();
        for f in &self.faces {
            if f.cycles.len() == 1 {
                *h.entry(f.sides).or_insert(0) += 1;
            }
        }
        h
    }

    /// Counts of (triangular, quadrilateral) convex faces.
    pub fn triangle_quad_counts(&self) -> (usize, usize) {
        let h = self.face_histogram();
        (h.get(&3).copied().unwrap_or(0), h.get(&4).copied().unwrap_or(0))
    }

    /// Packing index of the node `k`.
    pub fn node_vertex(&self, k: usize) -> usize {
        self.nodes[k]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packing::{gen_fcc, gen_hcp};

    #[test]
    fn fcc_has_eight_triangles_six_quads() {
        let p = gen_fcc(2).unwrap();
        let m = planar_map(&p, &p.index(), 0).unwrap();
        assert_eq!(m.nodes.len(), 12);
        assert_eq!(m.arcs.len(), 24);
        assert!(m.crossings.is_empty());
        assert_eq!(m.faces.len(), 14);
        assert_eq!(m.triangle_quad_counts(), (8, 6));
        assert!(m.faces.iter().all(|f| f.convex));
        let total: f64 = m.faces.iter().map(|f| f.area).sum();
        assert!((total - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn hcp_has_eight_triangles_six_quads() {
        let p = gen_hcp(2).unwrap();
        let m = planar_map(&p, &p.index(), 0).unwrap();
        assert_eq!(m.triangle_quad_counts(), (8, 6));
        assert_eq!(m.faces.len(), 14);
    }

    #[test]
    fn far_pair_has_no_arc() {
        let th = 2.0 * 0.65f64.asin();
        let pts = vec![
            Point3::ORIGIN,
            Point3::new(2.0, 0.0, 0.0),
            Point3::new(th.cos(), th.sin(), 0.0) * 2.0,
        ];
        assert!((pts[1].dist(pts[2]) - 2.6).abs() < 1e-12);
        let p = Packing::new("pair", crate::geometry::Aabb::cube(Point3::ORIGIN, 5.0), pts, false).unwrap();
        let m = planar_map(&p, &p.index(), 0).unwrap();
        assert_eq!(m.nodes.len(), 2);
        assert!(m.arcs.is_empty());
        assert_eq!(m.faces.len(), 1);
        assert!((m.faces[0].area - 4.0 * PI).abs() < 1e-12);
    }
}
