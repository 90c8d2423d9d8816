//! Selection of quarters into the D-system.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::simplices::{spine_order, QOctahedron, QTetra, SimplexCatalog, SimplexKind};
use super::spatial::BoxGrid;
use crate::error::{Error, Result};
use crate::geometry::{Tetra, EPS_GEO};
use crate::packing::Packing;

/// Positive-measure threshold for overlaps.
pub const OVERLAP_VOLUME: f64 = 1e-9;

/// Rule that admitted (or rejected) a tetrahedron.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AdmitRule {
    #[serde(rename = "QR")]
    Qr,
    #[serde(rename = "QL0")]
    Ql0,
    #[serde(rename = "QL1")]
    Ql1,
    #[serde(rename = "QL2")]
    Ql2,
    #[serde(rename = "QL3")]
    Ql3,
}

/// A member of the D-system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DTetra {
    pub vertices: [usize; 4],
    pub kind: SimplexKind,
    pub rule: AdmitRule,
}

impl DTetra {
    pub fn tetra(&self, p: &Packing) -> Tetra {
        Tetra::new(self.vertices.map(|i| p.centers[i]))
    }

    pub fn spine(&self) -> Option<usize> {
        match self.kind {
            SimplexKind::Ql { spine } => Some(spine),
            _ => None,
        }
    }
}

/// Outcome for one spine.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpineDecision {
    pub spine: usize,
    pub rule: AdmitRule,
    pub included: bool,
}

/// The selected set of quasi-regular tetrahedra and quarters.
#[derive(Clone, Debug, Default)]
pub struct DSystem {
    pub tetra: Vec<DTetra>,
    pub decisions: Vec<SpineDecision>,
    by_vertex: std::collections::HashMap<usize, Vec<usize>>,
    grid: BoxGrid,
}

impl DSystem {
    /// Members having `v` as a vertex.
    pub fn incident(&self, v: usize) -> &[usize] {
        self.by_vertex.get(&v).map_or(&[], |x| x.as_slice())
    }

    /// Members whose bounding boxes meet `b`.
    pub fn near(&self, b: &crate::geometry::Aabb) -> Vec<usize> {
        self.grid.query(b)
    }

    pub fn is_empty(&self) -> bool {
        self.tetra.is_empty()
    }

    pub fn len(&self) -> usize {
        self.tetra.len()
    }

    pub fn decision(&self, spine: usize) -> Option<&SpineDecision> {
        self.decisions.iter().find(|d| d.spine == spine)
    }

    fn push(&mut self, p: &Packing, t: DTetra) {
        let id = self.tetra.len();
        for v in t.vertices {
            self.by_vertex.entry(v).or_default().push(id);
        }
        self.grid.insert(t.tetra(p).bbox());
        self.tetra.push(t);
    }
}

/// Volume of the intersection of two tetrahedra.
pub fn overlap_volume(a: &Tetra, b: &Tetra) -> f64 {
    if !a.bbox().intersects(&b.bbox()) {
        return 0.0;
    }
    a.to_polyhedron().intersection_volume(&b.to_polyhedron())
}

/// All quasi-regular tetrahedra and quarters, indexed for overlap queries.
struct Candidates<'a> {
    p: &'a Packing,
    cat: &'a SimplexCatalog,
    grid: BoxGrid,
}

enum Cand {
    Qr,
    Ql(usize),
}

impl<'a> Candidates<'a> {
    fn new(p: &'a Packing, cat: &'a SimplexCatalog) -> Self {
        let mut grid = BoxGrid::new(3.0);
        for t in cat.qr.iter().chain(cat.ql.iter()) {
            grid.insert(t.tetra(p).bbox());
        }
        Candidates { p, cat, grid }
    }

    fn get(&self, id: usize) -> (Cand, &QTetra) {
        let nqr = self.cat.qr.len();
        if id < nqr {
            (Cand::Qr, &self.cat.qr[id])
        } else {
            (Cand::Ql(id - nqr), &self.cat.ql[id - nqr])
        }
    }

    /// Candidates overlapping `t` with positive volume, excluding quarters on `skip_spine`.
    fn overlapping(&self, t: &QTetra, skip_spine: Option<usize>) -> Vec<Cand> {
        let tt = t.tetra(self.p);
        let mut out = Vec::new();
        for id in self.grid.query(&tt.bbox()) {
            let (c, q) = self.get(id);
            if q.vertices == t.vertices {
                continue;
            }
            if let (SimplexKind::Ql { spine }, Some(s)) = (q.kind, skip_spine) {
                if spine == s {
                    continue;
                }
            }
            if overlap_volume(&tt, &q.tetra(self.p)) > OVERLAP_VOLUME {
                out.push(c);
            }
        }
        out
    }
}

/// The diagonal of `o` chosen for splitting: shortest, ties by lexicographic order.
fn chosen_diagonal(p: &Packing, o: &QOctahedron) -> [usize; 2] {
    let min = o.diagonal_lengths.iter().cloned().fold(f64::INFINITY, f64::min);
    (0..3)
        .filter(|&k| o.diagonal_lengths[k] <= min + EPS_GEO)
        .map(|k| o.diagonals[k])
        .min_by(|a, b| {
            p.centers[a[0]]
                .lex_cmp(&p.centers[b[0]])
                .then(p.centers[a[1]].lex_cmp(&p.centers[b[1]]))
        })
        .unwrap()
}

/// Applies the inclusion rules to every spine.
pub fn build_d_system(p: &Packing, cat: &SimplexCatalog) -> Result<DSystem> {
    let needs_overlaps = cat
        .spines
        .iter()
        .any(|s| s.isolated() || s.anchors.len() <= 3);
    let cands = needs_overlaps.then(|| Candidates::new(p, cat));
    let mut decisions = Vec::with_capacity(cat.spines.len());
    for (sid, s) in cat.spines.iter().enumerate() {
        let d = if s.isolated() {
            let c = cands.as_ref().unwrap();
            let included = c.overlapping(&cat.ql[s.ql[0]], None).is_empty();
            SpineDecision { spine: sid, rule: AdmitRule::Ql0, included }
        } else if s.anchors.len() >= 5 {
            SpineDecision { spine: sid, rule: AdmitRule::Ql1, included: true }
        } else if s.anchors.len() == 4 {
            let included = cat.octahedra_by_spine[sid]
                .iter()
                .map(|&o| &cat.octahedra[o])
                .filter(|o| o.live())
                .all(|o| {
                    let c = chosen_diagonal(p, o);
                    (c[0] == s.endpoints[0] && c[1] == s.endpoints[1]) || (c[0] == s.endpoints[1] && c[1] == s.endpoints[0])
                });
            SpineDecision { spine: sid, rule: AdmitRule::Ql2, included }
        } else {
            let c = cands.as_ref().unwrap();
            let mut hits_qr = false;
            let mut blocking = false;
            let mut rivals: BTreeSet<usize> = BTreeSet::new();
            for &q in &s.ql {
                for hit in c.overlapping(&cat.ql[q], Some(sid)) {
                    match hit {
                        Cand::Qr => hits_qr = true,
                        Cand::Ql(o) => {
                            let os = match cat.ql[o].kind {
                                SimplexKind::Ql { spine } => spine,
                                _ => unreachable!(),
                            };
                            let other = &cat.spines[os];
                            if other.isolated() {
                                continue;
                            }
                            if other.anchors.len() >= 4 {
                                blocking = true;
                            } else {
                                rivals.insert(os);
                            }
                        }
                    }
                }
            }
            let included = !hits_qr
                && !blocking
                && rivals
                    .iter()
                    .all(|&r| spine_order(p, s, &cat.spines[r]).is_lt());
            SpineDecision { spine: sid, rule: AdmitRule::Ql3, included }
        };
        decisions.push(d);
    }
    let mut ds = DSystem { grid: BoxGrid::new(3.0), ..Default::default() };
    for t in &cat.qr {
        ds.push(p, DTetra { vertices: t.vertices, kind: t.kind, rule: AdmitRule::Qr });
    }
    for d in &decisions {
        if d.included {
            for &q in &cat.spines[d.spine].ql {
                let t = &cat.ql[q];
                ds.push(p, DTetra { vertices: t.vertices, kind: t.kind, rule: d.rule });
            }
        }
    }
    ds.decisions = decisions;
    let bad = overlapping_pairs(p, &ds, true);
    if let Some((a, b, v)) = bad.first() {
        return Err(Error::Consistency(format!(
            "selected tetrahedra {:?} and {:?} overlap with volume {v:e}",
            ds.tetra[*a].vertices, ds.tetra[*b].vertices
        )));
    }
    Ok(ds)
}

/// Overlapping member pairs. With `quarters_only`, pairs of two quasi-regular
/// tetrahedra are skipped.
pub fn overlapping_pairs(p: &Packing, ds: &DSystem, quarters_only: bool) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for (i, t) in ds.tetra.iter().enumerate() {
        if quarters_only && t.kind == SimplexKind::Qr {
            continue;
        }
        let ti = t.tetra(p);
        for j in ds.near(&ti.bbox()) {
            if j == i || (j < i && !(quarters_only && ds.tetra[j].kind == SimplexKind::Qr)) {
                continue;
            }
            let v = overlap_volume(&ti, &ds.tetra[j].tetra(p));
            if v > OVERLAP_VOLUME {
                out.push((i.min(j), i.max(j), v));
            }
        }
    }
    out.sort_by_key(|a| (a.0, a.1));
    out.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
    out
}

/// Spines that are neither fully included nor fully excluded (always empty by
/// construction; kept as an explicit check of the all-or-none condition).
pub fn partial_spines(cat: &SimplexCatalog, ds: &DSystem) -> Vec<usize> {
    let mut count = vec![0usize; cat.spines.len()];
    for t in &ds.tetra {
        if let Some(s) = t.spine() {
            count[s] += 1;
        }
    }
    (0..cat.spines.len())
        .filter(|&s| count[s] != 0 && count[s] != cat.spines[s].ql.len())
        .collect()
}
