//! Points, simplices, convex polyhedra and ball-intersection volumes.

pub mod ball;
pub mod mensuration;
pub mod point;
pub mod polyhedron;
pub mod region;
pub mod tetra;

pub use ball::{ball_intersection_volume, right_cone_ball, triangle_solid_angle};
pub use mensuration::{
    a_coeff, circumcenter, cm_volume, delta, face_circumradius, rogers_volume, solid_angle,
    solid_angle_from_lengths, triangle_circumcenter, RogersShape,
};
pub use point::{det3, Aabb, Point3};
pub use polyhedron::{ConvexPolyhedron, Face, Plane};
pub use region::{covered_volume, halfspace_cell, HalfspaceCell, Region};
pub use tetra::Tetra;

/// Absolute tolerance for degeneracy predicates, in length units.
pub const EPS_GEO: f64 = 1e-9;
