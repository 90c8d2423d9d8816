use crate::geometry::{halfspace_cell, Aabb, HalfspaceCell};
use crate::packing::{NeighborIndex, Packing};

/// Neighbors farther than this never bound a cell of a saturated packing.
const LOCAL_REACH: f64 = 12.0;

/// Voronoi cell of center `v`, clipped to the domain inflated by 4√2.
pub fn voronoi_cell(p: &Packing, idx: &NeighborIndex, v: usize) -> HalfspaceCell {
    let c = p.centers[v];
    let outer = p.domain.inflate(4.0 * 2f64.sqrt());
    let local = Aabb::cube(c, LOCAL_REACH / 2.0);
    let clip = Aabb::new(local.min.max(outer.min), local.max.min(outer.max));
    let near: Vec<_> = idx.within(c, LOCAL_REACH).into_iter().map(|i| p.centers[i]).collect();
    let cell = halfspace_cell(c, &near, &clip);
    if cell.bounded {
        return cell;
    }
    let far: Vec<_> = idx
        .within(c, crate::constants::interior_margin())
        .into_iter()
        .map(|i| p.centers[i])
        .collect();
    halfspace_cell(c, &far, &outer)
}
