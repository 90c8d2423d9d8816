//! Numerical constants of the density problem.

use std::f64::consts::PI;

/// Density of the edge-2 regular octahedron with unit balls at its vertices,
/// (−3π + 12·arccos(1/√3))/√8.
pub fn delta_oct() -> f64 {
    (-3.0 * PI + 12.0 * (1.0 / 3f64.sqrt()).acos()) / 8f64.sqrt()
}

/// Compression of the regular tetrahedron of edge 2, 11π/3 − 12·arccos(1/√3).
pub fn pt() -> f64 {
    11.0 * PI / 3.0 - 12.0 * (1.0 / 3f64.sqrt()).acos()
}

/// Volume of the unit ball.
pub const KAPPA3: f64 = 4.0 * PI / 3.0;

/// Face-centered cubic density π/√18.
pub fn fcc_density() -> f64 {
    PI / 18f64.sqrt()
}

/// Quasi-regular edge threshold.
pub const QR_EDGE: f64 = 2.51;

/// Long-edge threshold 2√2 of a quarter.
pub fn ql_edge() -> f64 {
    2.0 * 2f64.sqrt()
}

/// Circumradius switch for quasi-regular scoring.
pub const QR_CIRCUMRADIUS: f64 = 1.41;

/// Fejes-Tóth shell width.
pub const FEJES_TOTH_T: f64 = 0.0534;

/// Hsiang neighbor radius.
pub const HSIANG_RADIUS: f64 = 2.18;

/// Truncation radius of the truncated Voronoi measure, half of 2.51.
pub const TRUNC_RADIUS: f64 = 1.255;

/// Interior margin required for local computations, 12√2.
pub fn interior_margin() -> f64 {
    12.0 * 2f64.sqrt()
}

/// Radius within which the vertices determining a star are expected, 6√2.
pub fn star_locality() -> f64 {
    6.0 * 2f64.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values() {
        assert!((delta_oct() - 0.720_903).abs() < 1e-6);
        assert!((pt() - 0.055_373_6).abs() < 1e-6);
        // κ − 2pt = 2√8·δ, which pins the two constants to each other.
        assert!((KAPPA3 - 2.0 * pt() - 2.0 * 8f64.sqrt() * delta_oct()).abs() < 1e-14);
    }
}
