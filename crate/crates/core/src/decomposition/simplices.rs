//! Enumeration of quasi-regular tetrahedra, quarters, spines and Q-octahedra.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::constants::{ql_edge, QR_EDGE};
use crate::geometry::{Aabb, Point3, Tetra, EPS_GEO};
use crate::packing::{NeighborIndex, Packing};

/// Shape class of a tetrahedron with vertices in the packing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimplexKind {
    /// All six edges at most 2.51.
    Qr,
    /// Five edges at most 2.51 and one (the spine) in (2.51, 2√2].
    Ql { spine: usize },
    /// Any other Delaunay simplex.
    PlainD,
}

/// Edge lengths up to 2.51 (inclusive, with slack) are short.
pub fn is_short(l: f64) -> bool {
    l <= QR_EDGE + EPS_GEO
}

/// Spine-length edges: (2.51, 2√2].
pub fn is_long(l: f64) -> bool {
    l > QR_EDGE + EPS_GEO && l <= ql_edge() + EPS_GEO
}

/// A tetrahedron referenced by packing indices (ascending).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QTetra {
    pub vertices: [usize; 4],
    pub kind: SimplexKind,
}

impl QTetra {
    pub fn tetra(&self, p: &Packing) -> Tetra {
        Tetra::new(self.vertices.map(|i| p.centers[i]))
    }

    pub fn has_vertex(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }

    /// Position of `v` among the vertices.
    pub fn local(&self, v: usize) -> Option<usize> {
        self.vertices.iter().position(|&w| w == v)
    }
}

/// The long edge shared by a group of quarters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spine {
    /// Endpoints, lexicographically ordered by coordinates.
    pub endpoints: [usize; 2],
    pub length: f64,
    /// Vertices within 2.51 of both endpoints, ascending.
    pub anchors: Vec<usize>,
    /// Indices into [`SimplexCatalog::ql`].
    pub ql: Vec<usize>,
}

impl Spine {
    /// Sole quarter on its spine.
    pub fn isolated(&self) -> bool {
        self.ql.len() == 1
    }

    pub fn other_end(&self, v: usize) -> Option<usize> {
        match self.endpoints {
            [a, b] if a == v => Some(b),
            [a, b] if b == v => Some(a),
            _ => None,
        }
    }
}

/// Octahedron with 12 edges in [2, 2.51].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QOctahedron {
    /// Ascending packing indices.
    pub vertices: [usize; 6],
    /// The three diagonals, each lexicographically ordered.
    pub diagonals: [[usize; 2]; 3],
    pub diagonal_lengths: [f64; 3],
    /// For each diagonal, the surrounding four vertices in cyclic order.
    pub equators: [[usize; 4]; 3],
}

impl QOctahedron {
    /// Some diagonal is short enough to split the octahedron into quarters.
    pub fn live(&self) -> bool {
        self.diagonal_lengths.iter().any(|&l| l <= ql_edge() + EPS_GEO)
    }

    pub fn diagonal_index(&self, d: [usize; 2]) -> Option<usize> {
        self.diagonals
            .iter()
            .position(|e| (e[0] == d[0] && e[1] == d[1]) || (e[0] == d[1] && e[1] == d[0]))
    }

    /// Whether the quarter with spine `d` and apexes `u`, `w` is one of the four
    /// pieces of the split along `d`.
    pub fn contains_quarter(&self, d: [usize; 2], u: usize, w: usize) -> bool {
        let Some(k) = self.diagonal_index(d) else { return false };
        let eq = self.equators[k];
        (0..4).any(|i| {
            let (a, b) = (eq[i], eq[(i + 1) % 4]);
            (a == u && b == w) || (a == w && b == u)
        })
    }
}

/// An edge within slack of a classification threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearThreshold {
    pub edge: [usize; 2],
    pub length: f64,
    pub threshold: f64,
}

/// Everything found by [`classify_simplices`].
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SimplexCatalog {
    pub qr: Vec<QTetra>,
    pub ql: Vec<QTetra>,
    pub spines: Vec<Spine>,
    pub octahedra: Vec<QOctahedron>,
    /// For each spine, the octahedra having it as a diagonal.
    pub octahedra_by_spine: Vec<Vec<usize>>,
    /// Quarters or quasi-regular tetrahedra with another center in their hull.
    pub not_d_simplex: Vec<[usize; 4]>,
    pub near_threshold: Vec<NearThreshold>,
    #[serde(skip)]
    spine_lookup: HashMap<[usize; 2], usize>,
}

impl SimplexCatalog {
    /// Spine id of the (unordered) vertex pair, if it is a spine.
    pub fn spine_of(&self, a: usize, b: usize) -> Option<usize> {
        self.spine_lookup.get(&[a.min(b), a.max(b)]).copied()
    }
}

fn lex_pair(p: &Packing, a: usize, b: usize) -> [usize; 2] {
    if p.centers[a].lex_cmp(&p.centers[b]).is_le() {
        [a, b]
    } else {
        [b, a]
    }
}

/// Enumerates every quadruple of centers with diameter at most 2√2 (restricted to
/// quadruples inside `region` when given) and classifies it.
pub fn classify_simplices(p: &Packing, idx: &NeighborIndex, region: Option<&Aabb>) -> SimplexCatalog {
    let reach = ql_edge() + EPS_GEO;
    let inside = |i: usize| region.map_or(true, |r| r.contains(p.centers[i]));
    let mut cat = SimplexCatalog::default();
    let mut near: HashMap<[usize; 2], NearThreshold> = HashMap::new();
    let mut note = |a: usize, b: usize, l: f64| {
        for t in [QR_EDGE, ql_edge(), 2.0] {
            if (l - t).abs() <= EPS_GEO && l != t {
                near.entry([a.min(b), a.max(b)]).or_insert(NearThreshold { edge: [a.min(b), a.max(b)], length: l, threshold: t });
            }
        }
    };
    for i in 0..p.len() {
        if !inside(i) {
            continue;
        }
        let ci = p.centers[i];
        let nb: Vec<usize> = idx.within(ci, reach).into_iter().filter(|&j| j > i && inside(j)).collect();
        let dist = |a: usize, b: usize| p.centers[a].dist(p.centers[b]);
        for (x, &j) in nb.iter().enumerate() {
            note(i, j, dist(i, j));
            for (y, &k) in nb.iter().enumerate().skip(x + 1) {
                let djk = dist(j, k);
                if djk > reach {
                    continue;
                }
                for &l in &nb[y + 1..] {
                    let (djl, dkl) = (dist(j, l), dist(k, l));
                    if djl > reach || dkl > reach {
                        continue;
                    }
                    let edges = [
                        ([i, j], dist(i, j)),
                        ([i, k], dist(i, k)),
                        ([i, l], dist(i, l)),
                        ([j, k], djk),
                        ([j, l], djl),
                        ([k, l], dkl),
                    ];
                    let long: Vec<[usize; 2]> = edges.iter().filter(|e| is_long(e.1)).map(|e| e.0).collect();
                    let short = edges.iter().filter(|e| is_short(e.1)).count();
                    let verts = [i, j, k, l];
                    match (short, long.len()) {
                        (6, 0) => cat.qr.push(QTetra { vertices: verts, kind: SimplexKind::Qr }),
                        (5, 1) => {
                            let s = long[0];
                            let key = [s[0].min(s[1]), s[0].max(s[1])];
                            let sid = *cat.spine_lookup.entry(key).or_insert_with(|| {
                                cat.spines.push(Spine {
                                    endpoints: lex_pair(p, s[0], s[1]),
                                    length: dist(s[0], s[1]),
                                    anchors: Vec::new(),
                                    ql: Vec::new(),
                                });
                                cat.spines.len() - 1
                            });
                            cat.spines[sid].ql.push(cat.ql.len());
                            cat.ql.push(QTetra { vertices: verts, kind: SimplexKind::Ql { spine: sid } });
                        }
                        _ => {}
                    }
                }
            }
        }
    }
    for e in [&cat.qr, &cat.ql] {
        for t in e.iter() {
            if !is_d_simplex(p, idx, t) {
                cat.not_d_simplex.push(t.vertices);
            }
        }
    }
    for s in cat.spines.iter_mut() {
        let [a, b] = s.endpoints;
        s.anchors = idx
            .within(p.centers[a], QR_EDGE + EPS_GEO)
            .into_iter()
            .filter(|&w| w != a && w != b && is_short(p.centers[w].dist(p.centers[b])))
            .collect();
    }
    find_octahedra(p, &mut cat);
    let mut nt: Vec<NearThreshold> = near.into_values().collect();
    nt.sort_by_key(|a| a.edge);
    for n in &nt {
        log::debug!("edge {:?} has length {} within tolerance of threshold {}", n.edge, n.length, n.threshold);
    }
    cat.near_threshold = nt;
    cat
}

/// No other center lies in the closed hull.
fn is_d_simplex(p: &Packing, idx: &NeighborIndex, t: &QTetra) -> bool {
    let tet = t.tetra(p);
    let c = tet.centroid();
    let r = tet.vertices().iter().map(|v| v.dist(c)).fold(0.0, f64::max);
    idx.within(c, r + EPS_GEO)
        .into_iter()
        .filter(|i| !t.vertices.contains(i))
        .all(|i| !tet.contains(p.centers[i], EPS_GEO))
}

fn find_octahedra(p: &Packing, cat: &mut SimplexCatalog) {
    let short = |a: usize, b: usize| is_short(p.centers[a].dist(p.centers[b]));
    let mut seen: HashMap<[usize; 6], usize> = HashMap::new();
    cat.octahedra_by_spine = vec![Vec::new(); cat.spines.len()];
    for sid in 0..cat.spines.len() {
        let s = &cat.spines[sid];
        if s.anchors.len() < 4 {
            continue;
        }
        let [a, b] = s.endpoints;
        let an = s.anchors.clone();
        let n = an.len();
        for x in 0..n {
            for z in x + 1..n {
                let (pp, r) = (an[x], an[z]);
                let common: Vec<usize> = an
                    .iter()
                    .copied()
                    .filter(|&q| q != pp && q != r && short(q, pp) && short(q, r))
                    .collect();
                for (ci, &q) in common.iter().enumerate() {
                    for &sv in &common[ci + 1..] {
                        let mut vs = [a, b, pp, q, r, sv];
                        vs.sort_unstable();
                        if seen.contains_key(&vs) {
                            continue;
                        }
                        let d = |u: usize, w: usize| p.centers[u].dist(p.centers[w]);
                        let oct = QOctahedron {
                            vertices: vs,
                            diagonals: [lex_pair(p, a, b), lex_pair(p, pp, r), lex_pair(p, q, sv)],
                            diagonal_lengths: [d(a, b), d(pp, r), d(q, sv)],
                            equators: [[pp, q, r, sv], [a, q, b, sv], [a, pp, b, r]],
                        };
                        seen.insert(vs, cat.octahedra.len());
                        cat.octahedra.push(oct);
                    }
                }
            }
        }
    }
    for (oi, o) in cat.octahedra.iter().enumerate() {
        for d in o.diagonals {
            if let Some(sid) = cat.spine_of(d[0], d[1]) {
                if !cat.octahedra_by_spine[sid].contains(&oi) {
                    cat.octahedra_by_spine[sid].push(oi);
                }
            }
        }
    }
}

/// Total order on spines: lowest endpoint first, then the other endpoint.
pub fn spine_order(p: &Packing, a: &Spine, b: &Spine) -> std::cmp::Ordering {
    let key = |s: &Spine| (p.centers[s.endpoints[0]], p.centers[s.endpoints[1]]);
    let (a0, a1) = key(a);
    let (b0, b1) = key(b);
    a0.lex_cmp(&b0).then(a1.lex_cmp(&b1))
}

/// Point coordinates of a spine's endpoints (for reports).
pub fn spine_points(p: &Packing, s: &Spine) -> [Point3; 2] {
    s.endpoints.map(|i| p.centers[i])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn octahedron() -> Packing {
        // Regular octahedron of edge 2: vertices ±√2 e_i, diagonals 2√2.
        let s = 2f64.sqrt();
        let pts = vec![
            Point3::new(s, 0.0, 0.0),
            Point3::new(-s, 0.0, 0.0),
            Point3::new(0.0, s, 0.0),
            Point3::new(0.0, -s, 0.0),
            Point3::new(0.0, 0.0, s),
            Point3::new(0.0, 0.0, -s),
        ];
        Packing::new("oct", Aabb::cube(Point3::ORIGIN, 4.0), pts, false).unwrap()
    }

    #[test]
    fn regular_octahedron_is_live_q_octahedron() {
        let p = octahedron();
        let cat = classify_simplices(&p, &p.index(), None);
        assert!(cat.qr.is_empty());
        assert_eq!(cat.ql.len(), 12);
        assert_eq!(cat.spines.len(), 3);
        assert_eq!(cat.octahedra.len(), 1);
        let o = &cat.octahedra[0];
        assert!(o.live());
        for l in o.diagonal_lengths {
            assert!((l - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        }
        for s in &cat.spines {
            assert_eq!(s.anchors.len(), 4);
            assert_eq!(s.ql.len(), 4);
        }
        assert!(cat.not_d_simplex.is_empty());
    }

    #[test]
    fn short_edge_boundary_counts_as_short() {
        assert!(is_short(2.51));
        assert!(!is_long(2.51));
        assert!(is_long(2.52));
        assert!(is_long(2.0 * 2f64.sqrt()));
        assert!(!is_long(2.83));
    }
}
