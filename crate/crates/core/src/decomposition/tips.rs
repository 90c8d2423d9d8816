//! Tips of D-system tetrahedra whose circumcenter lies outside them.

use serde::{Deserialize, Serialize};

use super::dsystem::{DSystem, OVERLAP_VOLUME};
use super::spatial::BoxGrid;
use crate::geometry::{ConvexPolyhedron, Plane, EPS_GEO};
use crate::packing::Packing;

/// Fraction of a tip's volume below which it counts as uncovered (and above
/// `1 −` which it counts as covered).
pub const COVER_FRACTION: f64 = 1e-6;
/// Tips smaller than this are ignored.
pub const MIN_TIP_VOLUME: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TipStatus {
    /// Contained in the union of D-system tetrahedra.
    Covered,
    /// Overlapping no D-system tetrahedron; subject to rearrangement.
    Uncovered,
    /// Partially covered. Left in place and reported.
    Partial,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tip {
    /// D-system index of the owning tetrahedron.
    pub tetra: usize,
    pub negative_vertex: usize,
    pub poly: ConvexPolyhedron,
    pub volume: f64,
    pub covered_fraction: f64,
    pub status: TipStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TipAnomaly {
    pub tetra: usize,
    pub detail: String,
}

/// All tips with a spatial index over the uncovered ones.
#[derive(Clone, Debug, Default)]
pub struct TipSet {
    pub tips: Vec<Tip>,
    pub anomalies: Vec<TipAnomaly>,
    /// Pairs of uncovered tips that overlap each other.
    pub overlapping: Vec<(usize, usize)>,
    uncovered_grid: BoxGrid,
    uncovered_ids: Vec<usize>,
}

impl TipSet {
    /// Uncovered tips whose boxes meet `b`.
    pub fn uncovered_near(&self, b: &crate::geometry::Aabb) -> Vec<usize> {
        self.uncovered_grid.query(b).into_iter().map(|k| self.uncovered_ids[k]).collect()
    }

    pub fn uncovered(&self) -> impl Iterator<Item = (usize, &Tip)> + '_ {
        self.uncovered_ids.iter().map(move |&i| (i, &self.tips[i]))
    }
}

/// Finds every tip, classifies it and checks the structural properties
/// expected of them.
pub fn compute_tips(p: &Packing, ds: &DSystem) -> TipSet {
    let mut set = TipSet { uncovered_grid: BoxGrid::new(3.0), ..Default::default() };
    for (ti, d) in ds.tetra.iter().enumerate() {
        let t = d.tetra(p);
        let Ok((x, r)) = t.circumcenter() else { continue };
        let Ok(lam) = t.barycentric(x) else { continue };
        let negative: Vec<usize> = (0..4).filter(|&k| lam[k] < -EPS_GEO).collect();
        if negative.is_empty() {
            continue;
        }
        if negative.len() > 1 {
            set.anomalies.push(TipAnomaly { tetra: ti, detail: format!("{} negative vertices", negative.len()) });
        }
        for &k in &negative {
            let v = t.vertex(k);
            let others: Vec<usize> = (0..4).filter(|&j| j != k).collect();
            let f = others.iter().map(|&j| t.vertex(j)).collect::<Vec<_>>();
            let mut h = Plane::through(f[0], f[1], f[2]);
            if h.signed_distance(x) > 0.0 {
                h = h.flipped();
            }
            let pts = t.vertices().iter().copied().chain([x]);
            let bb = crate::geometry::Aabb::from_points(pts).unwrap().inflate(r);
            let mut poly = Some(ConvexPolyhedron::from_box(&bb));
            for &j in &others {
                poly = poly.and_then(|q| q.clip(&Plane::bisector(v, t.vertex(j))));
            }
            let Some(poly) = poly.and_then(|q| q.clip(&h)) else { continue };
            let volume = poly.volume();
            if volume < MIN_TIP_VOLUME {
                continue;
            }
            if poly.vertices().iter().any(|&q| bb.depth(q) < EPS_GEO) {
                set.anomalies.push(TipAnomaly { tetra: ti, detail: "tip is unbounded".into() });
                continue;
            }
            // The vertices on H must lie in the face opposite v.
            let outside_face = poly.vertices().into_iter().any(|q| {
                h.signed_distance(q).abs() < 1e-7 && {
                    let l = t.barycentric(q).unwrap_or([0.0; 4]);
                    l.iter().any(|&c| c < -1e-7)
                }
            });
            if outside_face {
                set.anomalies.push(TipAnomaly {
                    tetra: ti,
                    detail: "tip vertex on the face plane lies outside the face".into(),
                });
            }
            let pb = poly.bbox();
            let mut covered = 0.0;
            for j in ds.near(&pb) {
                if j != ti {
                    covered += poly.intersection_volume(&ds.tetra[j].tetra(p).to_polyhedron());
                }
            }
            let frac = (covered / volume).clamp(0.0, 1.0);
            let status = if frac <= COVER_FRACTION {
                TipStatus::Uncovered
            } else if frac >= 1.0 - COVER_FRACTION {
                TipStatus::Covered
            } else {
                set.anomalies.push(TipAnomaly {
                    tetra: ti,
                    detail: format!("tip is partially covered (fraction {frac:.6})"),
                });
                TipStatus::Partial
            };
            set.tips.push(Tip { tetra: ti, negative_vertex: d.vertices[k], poly, volume, covered_fraction: frac, status });
        }
    }
    for (i, tip) in set.tips.iter().enumerate() {
        if tip.status == TipStatus::Uncovered {
            set.uncovered_grid.insert(tip.poly.bbox());
            set.uncovered_ids.push(i);
        }
    }
    for (a, &i) in set.uncovered_ids.iter().enumerate() {
        for b in set.uncovered_grid.query(&set.tips[i].poly.bbox()) {
            if b <= a {
                continue;
            }
            let j = set.uncovered_ids[b];
            if set.tips[i].poly.intersection_volume(&set.tips[j].poly) > OVERLAP_VOLUME {
                set.overlapping.push((i, j));
            }
        }
    }
    set
}
