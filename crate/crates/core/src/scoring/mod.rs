//! Region weights and vertex scores.
//!
//! Every scheme assigns each region R of its partition weights σ(R, v) at
//! nearby vertices with Σ_v σ(R, v) = (A·ρ(R) − B)·vol(R), where ρ(R) is the
//! fraction of R covered by the unit balls. The score of a vertex is the sum of
//! the weights it receives.

pub mod checks;
pub mod hf;
pub mod scheme;
pub mod star;
pub mod vor;

pub use checks::{
    check_admissibility, check_decoupling_truncation, AdmissibilityReport, DecouplingReport, FaceDecoupling,
    Violation,
};
pub use hf::{in_q_octahedron, sigma_hf, HfBranch, HfWeight};
pub use scheme::ScoreScheme;
pub use star::{near_neighbors, score_star, score_stars, Branch, FaceScore, RegionRef, RegionWeight, StarScore};
pub use vor::{
    circumcenter_in_cone, eta_plus, gamma_tetra, mu, rogers_flags, vor, vor_trunc, MuBranch, RogersFlag,
    TruncBranch,
};

use crate::constants::{delta_oct, KAPPA3};
use crate::decomposition::Decomposition;
use crate::geometry::{covered_volume, Point3, Region};

/// Centers whose unit balls can meet `r`.
pub fn centers_near(r: &Region, dec: &Decomposition) -> Vec<Point3> {
    let Some(bb) = r.bbox() else { return Vec::new() };
    let reach = 0.5 * bb.extent().norm() + 1.0;
    dec.index
        .within(bb.center(), reach)
        .into_iter()
        .map(|i| dec.packing.centers[i])
        .collect()
}

/// Compression Γ(R) = covered volume − δ_oct·vol(R).
pub fn compression(r: &Region, dec: &Decomposition) -> f64 {
    covered_volume(r, &centers_near(r, dec)) - delta_oct() * r.volume()
}

/// Voronoi-cell score (ρ − B)·vol at `w`; the cell holds exactly one unit ball.
pub fn voronoi_score(dec: &Decomposition, w: usize, b: f64) -> f64 {
    KAPPA3 - b * dec.voronoi_cell(w).poly.volume()
}
