//! V-cells: Voronoi cells with D-system tetrahedra removed and uncovered tips
//! handed to the nearest eligible vertex.

use serde::{Deserialize, Serialize};

use super::Decomposition;
use crate::error::{Error, Result};
use crate::geometry::{Plane, Region};

/// Pieces at or below this volume are dropped.
pub const MIN_PIECE_VOLUME: f64 = 1e-12;
/// Bound on the distance from a tip point to its nearest eligible vertex.
const TIP_REACH: f64 = 6.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PieceSource {
    /// Part of the reduced Voronoi cell.
    Reduced,
    /// Fragment of an uncovered tip assigned to this vertex.
    TipGained { tip: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VCell {
    pub owner: usize,
    pub region: Region,
    /// Provenance of each piece of `region`, in the same order.
    pub sources: Vec<PieceSource>,
    pub voronoi_volume: f64,
    /// False when the Voronoi cell was cut by the clip box.
    pub bounded: bool,
    /// Uncovered tips whose negative vertex is the owner.
    pub tips_lost: Vec<usize>,
}

impl VCell {
    pub fn volume(&self) -> f64 {
        self.region.volume()
    }
}

pub(crate) fn build_v_cell(dec: &Decomposition, v: usize) -> Result<VCell> {
    let p = &dec.packing;
    let c = p.centers[v];
    let vor = dec.voronoi_cell(v);
    let voronoi_volume = vor.poly.volume();
    let bb = vor.poly.bbox();
    let mut region = Region::new(Some(v), vec![vor.poly]);
    for t in dec.dsystem.near(&bb) {
        region.subtract(&dec.dsystem.tetra[t].tetra(p).to_polyhedron(), MIN_PIECE_VOLUME);
    }
    let nearby = dec.tips.uncovered_near(&bb.inflate(TIP_REACH));
    for &(a, b) in &dec.tips.overlapping {
        if nearby.contains(&a) || nearby.contains(&b) {
            return Err(Error::Anomaly(format!(
                "uncovered tips {a} and {b} overlap near vertex {v}"
            )));
        }
    }
    for &k in &nearby {
        let tip = &dec.tips.tips[k];
        if tip.poly.bbox().intersects(&bb) {
            region.subtract(&tip.poly, MIN_PIECE_VOLUME);
        }
    }
    let mut sources = vec![PieceSource::Reduced; region.pieces.len()];
    let mut tips_lost = Vec::new();
    for &k in &nearby {
        let tip = &dec.tips.tips[k];
        if tip.negative_vertex == v {
            tips_lost.push(k);
            continue;
        }
        let tb = tip.poly.bbox();
        if tb.distance_to(c) > TIP_REACH {
            continue;
        }
        let mut rivals: Vec<usize> = dec
            .index
            .within(tb.center(), 0.5 * tb.extent().norm() + TIP_REACH)
            .into_iter()
            .filter(|&u| u != v && u != tip.negative_vertex)
            .collect();
        rivals.sort_by(|&a, &b| p.centers[a].dist2(c).total_cmp(&p.centers[b].dist2(c)));
        let mut piece = Some(tip.poly.clone());
        for u in rivals {
            piece = piece.and_then(|q| q.clip(&Plane::bisector(c, p.centers[u])));
            if piece.is_none() {
                break;
            }
        }
        if let Some(q) = piece {
            if q.volume() > MIN_PIECE_VOLUME {
                region.pieces.push(q);
                sources.push(PieceSource::TipGained { tip: k });
            }
        }
    }
    let keep: Vec<bool> = region.pieces.iter().map(|q| q.volume() > MIN_PIECE_VOLUME).collect();
    let mut it = keep.iter();
    region.pieces.retain(|_| *it.next().unwrap());
    let mut it = keep.iter();
    sources.retain(|_| *it.next().unwrap());
    Ok(VCell { owner: v, region, sources, voronoi_volume, bounded: vor.bounded, tips_lost })
}
