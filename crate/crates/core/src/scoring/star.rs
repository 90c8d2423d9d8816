//! Vertex star scores for every scheme.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hf::{sigma_hf, HfBranch};
use super::scheme::ScoreScheme;
use super::vor::gamma_tetra;
use super::{compression, voronoi_score};
use crate::constants::HSIANG_RADIUS;
use crate::decomposition::{delaunay_star, Decomposition};
use crate::error::Result;
use crate::geometry::Tetra;

/// A region carrying weight at a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", content = "id", rename_all = "snake_case")]
pub enum RegionRef {
    /// Index into the D-system.
    DTetra(usize),
    /// V-cell of the vertex.
    VCell(usize),
    /// Voronoi cell of the vertex.
    Voronoi(usize),
    /// Delaunay simplex by its vertices.
    Delaunay([usize; 4]),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Hf(HfBranch),
    /// 4Γ of a V-cell.
    VCell,
    /// Weighted Voronoi-cell score.
    Voronoi,
    /// Γ of a Delaunay simplex.
    Delaunay,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionWeight {
    pub region: RegionRef,
    pub weight: f64,
    pub branch: Branch,
    /// Averaging weight ω applied to the region score (Voronoi-type schemes).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceScore {
    pub face: usize,
    pub sides: usize,
    pub convex: bool,
    pub score: f64,
    pub tetra: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StarScore {
    pub vertex: usize,
    pub scheme: ScoreScheme,
    pub total: f64,
    pub regions: Vec<RegionWeight>,
    /// Cluster scores by planar-map face (hybrid scheme only).
    pub faces: Vec<FaceScore>,
    /// Neighbor count within the Hsiang radius, for that scheme.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub near_neighbors: Option<usize>,
}

impl StarScore {
    /// Σ of region weights.
    pub fn region_total(&self) -> f64 {
        self.regions.iter().map(|r| r.weight).sum()
    }

    /// Σ of cluster scores, when clusters were computed.
    pub fn face_total(&self) -> Option<f64> {
        (!self.faces.is_empty()).then(|| self.faces.iter().map(|f| f.score).sum())
    }

    /// Numbers of faces by side count.
    pub fn face_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for f in &self.faces {
            *h.entry(f.sides).or_insert(0) += 1;
        }
        h
    }
}

/// Score of the decomposition star at `v`.
pub fn score_star(dec: &Decomposition, v: usize, scheme: &ScoreScheme) -> Result<StarScore> {
    scheme.validate()?;
    dec.packing.require_interior(v)?;
    dec.check_focus(v)?;
    let star = match *scheme {
        ScoreScheme::Hf => hf_star(dec, v)?,
        ScoreScheme::Voronoi { b } => {
            let s = voronoi_score(dec, v, b);
            let regions = vec![RegionWeight {
                region: RegionRef::Voronoi(v),
                weight: s,
                branch: Branch::Voronoi,
                omega: Some(1.0),
            }];
            StarScore { vertex: v, scheme: *scheme, total: s, regions, faces: vec![], near_neighbors: None }
        }
        ScoreScheme::FejesToth { t } => {
            let (_, b) = scheme.constants();
            let near = near_neighbors(dec, v, 2.0 + t);
            let mut regions = vec![RegionWeight {
                region: RegionRef::Voronoi(v),
                weight: 0.0,
                branch: Branch::Voronoi,
                omega: Some(1.0 - near.len() as f64 / 12.0),
            }];
            regions.extend(near.iter().map(|&w| RegionWeight {
                region: RegionRef::Voronoi(w),
                weight: 0.0,
                branch: Branch::Voronoi,
                omega: Some(1.0 / 12.0),
            }));
            weigh_voronoi(dec, &mut regions, b);
            let total = regions.iter().map(|r| r.weight).sum();
            StarScore { vertex: v, scheme: *scheme, total, regions, faces: vec![], near_neighbors: None }
        }
        ScoreScheme::Hsiang => {
            let (_, b) = scheme.constants();
            let near = near_neighbors(dec, v, HSIANG_RADIUS);
            let omega = 1.0 / (1.0 + near.len() as f64);
            let mut regions: Vec<RegionWeight> = std::iter::once(v)
                .chain(near.iter().copied())
                .map(|w| RegionWeight {
                    region: RegionRef::Voronoi(w),
                    weight: 0.0,
                    branch: Branch::Voronoi,
                    omega: Some(omega),
                })
                .collect();
            weigh_voronoi(dec, &mut regions, b);
            let total = regions.iter().map(|r| r.weight).sum();
            StarScore {
                vertex: v,
                scheme: *scheme,
                total,
                regions,
                faces: vec![],
                near_neighbors: Some(near.len()),
            }
        }
        ScoreScheme::HalesDelaunay => {
            let p = &dec.packing;
            let mut regions = Vec::new();
            for q in delaunay_star(p, &dec.index, v)? {
                let g = gamma_tetra(&Tetra::new(q.map(|i| p.centers[i])))?;
                regions.push(RegionWeight {
                    region: RegionRef::Delaunay(q),
                    weight: g,
                    branch: Branch::Delaunay,
                    omega: None,
                });
            }
            let total = regions.iter().map(|r| r.weight).sum();
            StarScore { vertex: v, scheme: *scheme, total, regions, faces: vec![], near_neighbors: None }
        }
    };
    Ok(star)
}

/// Scores at several vertices, in the given order.
pub fn score_stars(dec: &Decomposition, vs: &[usize], scheme: &ScoreScheme) -> Result<Vec<StarScore>> {
    vs.par_iter().map(|&v| score_star(dec, v, scheme)).collect()
}

/// Other centers within `r` of `v`, ascending.
pub fn near_neighbors(dec: &Decomposition, v: usize, r: f64) -> Vec<usize> {
    let c = dec.packing.centers[v];
    dec.index.within(c, r + 1e-12).into_iter().filter(|&w| w != v).collect()
}

fn weigh_voronoi(dec: &Decomposition, regions: &mut [RegionWeight], b: f64) {
    for r in regions.iter_mut() {
        if let (RegionRef::Voronoi(w), Some(om)) = (r.region, r.omega) {
            r.weight = om * voronoi_score(dec, w, b);
        }
    }
}

fn hf_star(dec: &Decomposition, v: usize) -> Result<StarScore> {
    let mut regions = Vec::new();
    let mut by_tetra = BTreeMap::new();
    for &id in dec.dsystem.incident(v) {
        let w = sigma_hf(dec, id, v)?;
        by_tetra.insert(id, w.value);
        regions.push(RegionWeight {
            region: RegionRef::DTetra(id),
            weight: w.value,
            branch: Branch::Hf(w.branch),
            omega: None,
        });
    }
    let cell = dec.v_cell(v)?;
    let cell_score = 4.0 * compression(&cell.region, dec);
    regions.push(RegionWeight { region: RegionRef::VCell(v), weight: cell_score, branch: Branch::VCell, omega: None });
    let map = dec.planar_map(v)?;
    let clusters = dec.clusters(v, &map, &cell)?;
    let faces = clusters
        .clusters
        .iter()
        .map(|c| {
            let face = map.faces.get(c.face);
            FaceScore {
                face: c.face,
                sides: face.map_or(0, |f| f.sides),
                convex: face.is_some_and(|f| f.convex),
                score: c.tetra.iter().map(|t| by_tetra[t]).sum::<f64>() + 4.0 * compression(&c.vcell, dec),
                tetra: c.tetra.clone(),
            }
        })
        .collect();
    let total = regions.iter().map(|r| r.weight).sum();
    Ok(StarScore { vertex: v, scheme: ScoreScheme::Hf, total, regions, faces, near_neighbors: None })
}
