//! Weights of the hybrid decomposition.

use serde::{Deserialize, Serialize};

use super::vor::{gamma_tetra, mu, vor, vor_trunc, MuBranch, TruncBranch};
use crate::constants::{QR_CIRCUMRADIUS, TRUNC_RADIUS};
use crate::decomposition::{Decomposition, SimplexKind};
use crate::error::{Error, Result};
use crate::geometry::EPS_GEO;

/// Which rule produced a tetrahedron weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HfBranch {
    /// Quasi-regular with small circumradius: Γ(T).
    QrGamma,
    /// Quasi-regular with large circumradius: vor(T, v).
    QrVor,
    /// Quarter seen from a vertex off its spine, or an isolated quarter.
    Mu(MuBranch),
    /// Quarter of a Q-octahedron: the average of μ at both spine ends.
    OctahedronAverage,
    /// Other quarters: the average plus half the difference of truncated measures.
    Truncated(TruncBranch),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HfWeight {
    pub value: f64,
    pub branch: HfBranch,
}

/// Whether D-system member `id` (a quarter) is one of the four pieces of a live
/// Q-octahedron split along its spine.
pub fn in_q_octahedron(dec: &Decomposition, id: usize) -> bool {
    let d = &dec.dsystem.tetra[id];
    let Some(s) = d.spine() else { return false };
    let ends = dec.catalog.spines[s].endpoints;
    let mut apex = d.vertices.iter().copied().filter(|v| !ends.contains(v));
    let (Some(u), Some(w)) = (apex.next(), apex.next()) else { return false };
    dec.catalog.octahedra_by_spine[s].iter().any(|&o| {
        let oct = &dec.catalog.octahedra[o];
        oct.live() && oct.contains_quarter(ends, u, w)
    })
}

/// Weight of D-system member `id` at its vertex `v`.
pub fn sigma_hf(dec: &Decomposition, id: usize, v: usize) -> Result<HfWeight> {
    let d = dec
        .dsystem
        .tetra
        .get(id)
        .ok_or_else(|| Error::Classification(format!("no D-system member {id}")))?;
    let k = d
        .vertices
        .iter()
        .position(|&w| w == v)
        .ok_or_else(|| Error::Classification(format!("vertex {v} is not a corner of member {id}")))?;
    let t = d.tetra(&dec.packing);
    match d.kind {
        SimplexKind::Qr => {
            let (_, r) = t.circumcenter()?;
            if r <= QR_CIRCUMRADIUS + EPS_GEO {
                Ok(HfWeight { value: gamma_tetra(&t)?, branch: HfBranch::QrGamma })
            } else {
                Ok(HfWeight { value: vor(&t, k)?, branch: HfBranch::QrVor })
            }
        }
        SimplexKind::Ql { spine } => {
            let sp = &dec.catalog.spines[spine];
            let local = |w: usize| d.vertices.iter().position(|&x| x == w).unwrap();
            let s = [local(sp.endpoints[0]), local(sp.endpoints[1])];
            let Some(vh) = sp.other_end(v) else {
                let (value, b) = mu(&t, s, k)?;
                return Ok(HfWeight { value, branch: HfBranch::Mu(b) });
            };
            if sp.isolated() {
                let (value, b) = mu(&t, s, k)?;
                return Ok(HfWeight { value, branch: HfBranch::Mu(b) });
            }
            let kh = local(vh);
            let avg = 0.5 * (mu(&t, s, k)?.0 + mu(&t, s, kh)?.0);
            if in_q_octahedron(dec, id) {
                return Ok(HfWeight { value: avg, branch: HfBranch::OctahedronAverage });
            }
            let (a, b) = vor_trunc(&t, k, TRUNC_RADIUS)?;
            let (ah, _) = vor_trunc(&t, kh, TRUNC_RADIUS)?;
            Ok(HfWeight { value: avg + 0.5 * (a - ah), branch: HfBranch::Truncated(b) })
        }
        SimplexKind::PlainD => Err(Error::Classification(format!(
            "member {id} is neither quasi-regular nor a quarter"
        ))),
    }
}
