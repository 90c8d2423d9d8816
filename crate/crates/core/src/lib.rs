//! Local density decompositions of finite sphere packings.
//!
//! Unit balls sit at the centers of a [`packing::Packing`]. Space around each
//! center is cut into regions (Voronoi cells, Delaunay simplices, or the hybrid
//! system of quasi-regular tetrahedra, quarters and V-cells) and every region is
//! weighted toward its vertices. The [`scoring`] module evaluates those weights,
//! [`bounds`] turns a bound on vertex scores into a global density bound and
//! checks it numerically, and [`oracle`] provides Monte Carlo estimators used to
//! cross-check the analytic formulas.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Small dense matrices read better with explicit indices.
#![allow(clippy::needless_range_loop)]

pub mod constants;
pub mod decomposition;
pub mod error;
pub mod geometry;
pub mod oracle;
pub mod packing;
pub mod scoring;
pub mod bounds;
pub mod report;

pub use error::{Error, Result};
