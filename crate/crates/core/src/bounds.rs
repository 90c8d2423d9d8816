//! From vertex scores to a global density bound, and numerical checks of the
//! counting argument behind it.
//!
//! If every vertex score is at most θ < κ·A, the density of any saturated
//! packing is at most f(A, B, θ) = κ·B / (κ·A − θ), where κ is the volume of
//! the unit ball. Everything here works on finite packings, so θ is only ever
//! estimated from below.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{interior_margin, KAPPA3};
use crate::decomposition::{delaunay_star, Decomposition, DecompositionOptions};
use crate::error::{Error, Result};
use crate::geometry::{covered_volume, Aabb, ConvexPolyhedron, Point3, Region, Tetra};
use crate::packing::Packing;
use crate::scoring::{compression, gamma_tetra, near_neighbors, score_stars, sigma_hf, ScoreScheme};

/// Fraction of `cube` covered by the unit balls of `p`.
pub fn density(p: &Packing, cube: &Aabb) -> Result<f64> {
    if !p.domain.contains_box(cube, 1e-9) {
        return Err(Error::InvalidInput(format!("box {cube:?} leaves the packing domain")));
    }
    let vol = cube.volume();
    if !(vol > 0.0) {
        return Err(Error::Degenerate("box has no volume"));
    }
    Ok(covered_in_box(p, cube) / vol)
}

fn covered_in_box(p: &Packing, cube: &Aabb) -> f64 {
    let reach = cube.inflate(1.0);
    let centers: Vec<Point3> = p.centers.iter().copied().filter(|&c| reach.contains(c)).collect();
    covered_volume(&Region::new(None, vec![ConvexPolyhedron::from_box(cube)]), &centers)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperDensity {
    pub side: f64,
    /// Lower corner of the densest cube found.
    pub corner: Point3,
    pub density: f64,
    pub evaluated: usize,
}

/// Densest cube of side `side` whose lower corner lies in `search`, over a grid
/// of the given stride followed by two rounds of local refinement. This bounds
/// the supremum over all translates from below.
pub fn upper_density(p: &Packing, side: f64, search: &Aabb, stride: f64) -> Result<UpperDensity> {
    if !(side > 0.0 && stride > 0.0) {
        return Err(Error::InvalidInput(format!("side {side} and stride {stride} must be positive")));
    }
    let fits = |x: Point3| p.domain.contains_box(&Aabb::new(x, x + Point3::new(side, side, side)), 1e-9);
    let steps = |a: f64, b: f64| ((b - a) / stride).floor() as usize + 1;
    let (lo, hi) = (search.min, search.max);
    let (nx, ny, nz) = (steps(lo.x, hi.x), steps(lo.y, hi.y), steps(lo.z, hi.z));
    let grid: Vec<Point3> = (0..nx * ny * nz)
        .map(|k| {
            let (i, j, l) = (k % nx, (k / nx) % ny, k / (nx * ny));
            lo + Point3::new(i as f64, j as f64, l as f64) * stride
        })
        .filter(|&x| fits(x))
        .collect();
    if grid.is_empty() {
        return Err(Error::InvalidInput("no cube of that size fits the search box and domain".into()));
    }
    let eval = |x: Point3| {
        let c = Aabb::new(x, x + Point3::new(side, side, side));
        covered_in_box(p, &c) / c.volume()
    };
    let best_of = |pts: &[Point3]| {
        pts.par_iter()
            .map(|&x| (eval(x), x))
            .reduce(|| (f64::NEG_INFINITY, Point3::ORIGIN), |a, b| if b.0 > a.0 { b } else { a })
    };
    let mut evaluated = grid.len();
    let (mut best, mut corner) = best_of(&grid);
    let mut h = stride;
    for _ in 0..2 {
        h *= 0.5;
        let local: Vec<Point3> = (0..27)
            .map(|k| corner + Point3::new((k % 3) as f64 - 1.0, ((k / 3) % 3) as f64 - 1.0, (k / 9) as f64 - 1.0) * h)
            .filter(|&x| fits(x))
            .collect();
        evaluated += local.len();
        let (d, x) = best_of(&local);
        if d > best {
            best = d;
            corner = x;
        }
    }
    Ok(UpperDensity { side, corner, density: best, evaluated })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub a: f64,
    pub b: f64,
    pub theta: f64,
    pub n: usize,
    pub kappa: f64,
    /// κB/(κA − θ), present when θ < κA.
    pub value: Option<f64>,
}

impl BoundResult {
    pub fn valid(&self) -> bool {
        self.value.is_some()
    }
}

/// The density bound κB/(κA − θ) in three dimensions.
pub fn bound_f(a: f64, b: f64, theta: f64) -> Result<BoundResult> {
    if !(a > 0.0 && b > 0.0 && theta.is_finite()) {
        return Err(Error::InvalidInput(format!("need A, B > 0 and finite θ; got {a}, {b}, {theta}")));
    }
    let den = KAPPA3 * a - theta;
    let value = (den > 0.0).then(|| KAPPA3 * b / den);
    Ok(BoundResult { a, b, theta, n: 3, kappa: KAPPA3, value })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaEstimate {
    pub scheme: ScoreScheme,
    /// Largest star score found; a lower bound on the true supremum.
    pub theta: f64,
    pub argmax: usize,
    pub vertices_scored: usize,
}

/// Largest star score over `vertices` (all interior vertices in the focus when
/// empty).
pub fn empirical_theta(dec: &Decomposition, scheme: &ScoreScheme, vertices: &[usize]) -> Result<ThetaEstimate> {
    let vs: Vec<usize> = if vertices.is_empty() { scorable_vertices(dec) } else { vertices.to_vec() };
    if vs.is_empty() {
        return Err(Error::Locality { vertex: 0, distance: 0.0, required: interior_margin() });
    }
    let scores = score_stars(dec, &vs, scheme)?;
    let (argmax, theta) = scores
        .iter()
        .map(|s| (s.vertex, s.total))
        .fold((vs[0], f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    Ok(ThetaEstimate { scheme: *scheme, theta, argmax, vertices_scored: vs.len() })
}

/// Interior vertices inside the decomposition focus.
pub fn scorable_vertices(dec: &Decomposition) -> Vec<usize> {
    let p = &dec.packing;
    (0..p.len())
        .filter(|&i| p.is_interior(i) && dec.focus.map_or(true, |f| f.contains(p.centers[i])))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TelescopingReport {
    pub scheme: ScoreScheme,
    pub cube: Aabb,
    pub side: f64,
    pub vertices: usize,
    /// Σ of star scores over the vertices in the cube.
    pub score_sum: f64,
    /// Σ of (Aρ − B)·vol over regions inside the cube.
    pub region_sum: f64,
    /// Σ of all vertex weights of the regions inside the cube.
    pub region_weight_sum: f64,
    pub regions: usize,
    /// κ·A·N − B·T³.
    pub counting_form: f64,
    /// `score_sum − region_sum`, due to regions near the cube boundary.
    pub residual: f64,
    /// `region_weight_sum − region_sum`; zero up to rounding for an admissible scheme.
    pub interior_identity: f64,
}

/// Evaluates both sides of the counting identity on `cube`.
pub fn verify_telescoping(dec: &Decomposition, cube: &Aabb, scheme: &ScoreScheme) -> Result<TelescopingReport> {
    scheme.validate()?;
    let p = &dec.packing;
    let margin = interior_margin();
    let depth = [cube.min, cube.max]
        .iter()
        .map(|&x| p.domain.depth(x))
        .fold(f64::INFINITY, f64::min);
    if depth < margin {
        return Err(Error::InsufficientMargin(format!(
            "cube lies {depth} from the domain boundary; {margin} is needed"
        )));
    }
    if let Some(f) = dec.focus {
        if !f.contains_box(cube, 1e-9) {
            return Err(Error::InsufficientMargin("cube is not inside the decomposition focus".into()));
        }
    }
    let vs: Vec<usize> = (0..p.len()).filter(|&i| cube.contains(p.centers[i])).collect();
    let (a, b) = scheme.constants();
    let stars = score_stars(dec, &vs, scheme)?;
    let score_sum: f64 = stars.iter().map(|s| s.total).sum();
    let inside = |bb: &Aabb| cube.contains_box(bb, 1e-12);
    let mut region_sum = 0.0;
    let mut weight_sum = 0.0;
    let mut regions = 0usize;
    match *scheme {
        ScoreScheme::Hf => {
            let ids: Vec<usize> = (0..dec.dsystem.len())
                .filter(|&id| inside(&dec.dsystem.tetra[id].tetra(p).bbox()))
                .collect();
            let rows: Vec<Result<(f64, f64)>> = ids
                .par_iter()
                .map(|&id| {
                    let d = &dec.dsystem.tetra[id];
                    let mut w = 0.0;
                    for &v in &d.vertices {
                        w += sigma_hf(dec, id, v)?.value;
                    }
                    Ok((a * gamma_tetra(&d.tetra(p))?, w))
                })
                .collect();
            for r in rows {
                let (g, w) = r?;
                regions += 1;
                region_sum += g;
                weight_sum += w;
            }
            let cells: Vec<Result<Option<f64>>> = vs
                .par_iter()
                .map(|&v| {
                    let cell = dec.v_cell(v)?;
                    Ok(match cell.region.bbox() {
                        Some(bb) if inside(&bb) => Some(a * compression(&cell.region, dec)),
                        Some(_) => None,
                        None => Some(0.0),
                    })
                })
                .collect();
            for c in cells {
                if let Some(g) = c? {
                    regions += 1;
                    region_sum += g;
                    weight_sum += g;
                }
            }
        }
        ScoreScheme::HalesDelaunay => {
            let mut simplices = BTreeSet::new();
            for &v in &vs {
                simplices.extend(delaunay_star(p, &dec.index, v)?);
            }
            for q in simplices {
                let t = Tetra::new(q.map(|i| p.centers[i]));
                if inside(&t.bbox()) {
                    let g = gamma_tetra(&t)?;
                    regions += 1;
                    region_sum += a * g;
                    weight_sum += 4.0 * g;
                }
            }
        }
        ScoreScheme::Voronoi { .. } | ScoreScheme::FejesToth { .. } | ScoreScheme::Hsiang => {
            for &w in &vs {
                let cell = dec.voronoi_cell(w).poly;
                if !inside(&cell.bbox()) {
                    continue;
                }
                let s = a * KAPPA3 - b * cell.volume();
                regions += 1;
                region_sum += s;
                weight_sum += s * weight_total(dec, scheme, w);
            }
        }
    }
    let side = cube.extent().x;
    Ok(TelescopingReport {
        scheme: *scheme,
        cube: *cube,
        side,
        vertices: vs.len(),
        score_sum,
        region_sum,
        region_weight_sum: weight_sum,
        regions,
        counting_form: KAPPA3 * a * vs.len() as f64 - b * cube.volume(),
        residual: score_sum - region_sum,
        interior_identity: weight_sum - region_sum,
    })
}

/// Σ_v ω(w, v) for the averaging schemes.
fn weight_total(dec: &Decomposition, scheme: &ScoreScheme, w: usize) -> f64 {
    match *scheme {
        ScoreScheme::FejesToth { t } => {
            let near = near_neighbors(dec, w, 2.0 + t);
            let mut s = 1.0 - near.len() as f64 / 12.0;
            for v in near {
                if near_neighbors(dec, v, 2.0 + t).contains(&w) {
                    s += 1.0 / 12.0;
                }
            }
            s
        }
        ScoreScheme::Hsiang => {
            let r = crate::constants::HSIANG_RADIUS;
            std::iter::once(w)
                .chain(near_neighbors(dec, w, r))
                .map(|v| 1.0 / (1.0 + near_neighbors(dec, v, r).len() as f64))
                .sum()
        }
        _ => 1.0,
    }
}

/// Telescoping over concentric cubes of the given sides centered at `center`,
/// with the focus of each decomposition set to its cube.
pub fn telescoping_series(
    p: &Packing,
    center: Point3,
    sides: &[f64],
    scheme: &ScoreScheme,
) -> Result<Vec<TelescopingReport>> {
    sides
        .iter()
        .map(|&t| {
            let cube = Aabb::cube(center, 0.5 * t);
            let dec = Decomposition::build_with(p, &DecompositionOptions { focus: Some(cube.inflate(1e-6)) })?;
            verify_telescoping(&dec, &cube, scheme)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{delta_oct, fcc_density, pt};

    #[test]
    fn bound_at_the_two_optimal_points() {
        let f = bound_f(4.0, 4.0 * delta_oct(), 8.0 * pt()).unwrap();
        assert!((f.value.unwrap() - fcc_density()).abs() < 1e-12);
        let g = bound_f(1.0, fcc_density(), 0.0).unwrap();
        assert!((g.value.unwrap() - fcc_density()).abs() < 1e-12);
        assert!(!bound_f(1.0, 1.0, KAPPA3).unwrap().valid());
        assert!(bound_f(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn single_ball_in_a_cube() {
        let p = Packing::new("one", Aabb::cube(Point3::ORIGIN, 3.0), vec![Point3::ORIGIN], false).unwrap();
        let d = density(&p, &Aabb::cube(Point3::ORIGIN, 2.0)).unwrap();
        assert!((d - KAPPA3 / 64.0).abs() < 1e-12);
        assert_eq!(density(&p, &Aabb::cube(Point3::new(1.5, 1.5, 1.5), 0.4)).unwrap(), 0.0);
        assert!(density(&p, &Aabb::cube(Point3::ORIGIN, 4.0)).is_err());
    }
}
