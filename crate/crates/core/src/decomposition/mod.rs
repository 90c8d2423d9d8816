//! The hybrid decomposition: quasi-regular tetrahedra, quarters, tips, V-cells,
//! planar maps and clusters, plus Voronoi cells and Delaunay stars for the
//! other scoring schemes.

pub mod clusters;
pub mod delaunay;
pub mod dsystem;
pub mod planar_map;
pub mod simplices;
pub mod spatial;
pub mod tips;
pub mod vcells;
pub mod voronoi;

use rayon::prelude::*;

pub use clusters::{Cluster, ClusterSet};
pub use delaunay::delaunay_star;
pub use dsystem::{build_d_system, AdmitRule, DSystem, DTetra, SpineDecision};
pub use planar_map::{MapFace, PlanarMap};
pub use simplices::{classify_simplices, QOctahedron, QTetra, SimplexCatalog, SimplexKind, Spine};
pub use tips::{compute_tips, Tip, TipSet, TipStatus};
pub use vcells::{PieceSource, VCell};
pub use voronoi::voronoi_cell;

use crate::error::{Error, Result};
use crate::geometry::{Aabb, HalfspaceCell};
use crate::packing::{NeighborIndex, Packing};

/// Extra width classified around a focus box.
pub const FOCUS_MARGIN: f64 = 12.0;

#[derive(Clone, Debug, Default)]
pub struct DecompositionOptions {
    /// Restrict the work to what local computations inside this box need.
    pub focus: Option<Aabb>,
}

/// A packing with its D-system, tips and neighbor index.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub packing: Packing,
    pub index: NeighborIndex,
    pub catalog: SimplexCatalog,
    pub dsystem: DSystem,
    pub tips: TipSet,
    pub focus: Option<Aabb>,
}

impl Decomposition {
    pub fn build(p: &Packing) -> Result<Self> {
        Self::build_with(p, &DecompositionOptions::default())
    }

    pub fn build_with(p: &Packing, opts: &DecompositionOptions) -> Result<Self> {
        let index = p.index();
        let region = opts.focus.map(|f| f.inflate(FOCUS_MARGIN));
        let catalog = classify_simplices(p, &index, region.as_ref());
        let dsystem = build_d_system(p, &catalog)?;
        let tips = compute_tips(p, &dsystem);
        Ok(Decomposition { packing: p.clone(), index, catalog, dsystem, tips, focus: opts.focus })
    }

    /// Errors unless local computations at `v` are meaningful here.
    pub fn check_focus(&self, v: usize) -> Result<()> {
        match self.focus {
            Some(f) if !f.contains(self.packing.centers[v]) => Err(Error::InvalidInput(format!(
                "vertex {v} lies outside the decomposition focus"
            ))),
            _ => Ok(()),
        }
    }

    pub fn voronoi_cell(&self, v: usize) -> HalfspaceCell {
        voronoi_cell(&self.packing, &self.index, v)
    }

    pub fn v_cell(&self, v: usize) -> Result<VCell> {
        self.check_focus(v)?;
        vcells::build_v_cell(self, v)
    }

    pub fn v_cells(&self, vs: &[usize]) -> Result<Vec<VCell>> {
        vs.par_iter().map(|&v| self.v_cell(v)).collect()
    }

    pub fn planar_map(&self, v: usize) -> Result<PlanarMap> {
        planar_map::planar_map(&self.packing, &self.index, v)
    }

    pub fn clusters(&self, v: usize, map: &PlanarMap, cell: &VCell) -> Result<ClusterSet> {
        clusters::clusters(self, v, map, cell)
    }
}
