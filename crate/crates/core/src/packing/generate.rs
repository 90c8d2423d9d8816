use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{scan_holes, Packing, SATURATION_SPACING};
use crate::error::{Error, Result};
use crate::geometry::{Aabb, Point3};

/// Extra layer generated outside the domain so that saturation holds up to its boundary.
const PAD: f64 = 3.0;

fn half_width(shells: usize, nn: f64) -> f64 {
    shells as f64 * nn * 2f64.sqrt()
}

fn check_shells(shells: usize) -> Result<()> {
    if shells < 2 {
        return Err(Error::InvalidInput(format!("shells must be at least 2, got {shells}")));
    }
    Ok(())
}

fn fcc_points(half: f64, nn: f64) -> Vec<Point3> {
    let a = nn * 2f64.sqrt();
    let h = a / 2.0;
    let basis = [
        Point3::ORIGIN,
        Point3::new(h, h, 0.0),
        Point3::new(h, 0.0, h),
        Point3::new(0.0, h, h),
    ];
    let n = (half / a).ceil() as i64 + 1;
    let mut pts = Vec::new();
    for i in -n..=n {
        for j in -n..=n {
            for k in -n..=n {
                let o = Point3::new(i as f64, j as f64, k as f64) * a;
                for b in basis {
                    let p = o + b;
                    if p.x.abs() <= half && p.y.abs() <= half && p.z.abs() <= half {
                        pts.push(p);
                    }
                }
            }
        }
    }
    sort_points(&mut pts);
    pts
}

fn sort_points(pts: &mut [Point3]) {
    pts.sort_by(|a, b| a.norm2().total_cmp(&b.norm2()).then(a.lex_cmp(b)));
}

/// Face-centered cubic packing with nearest-neighbor distance 2, centered on the
/// vertex at the origin (index 0). The domain is the cube of half-width
/// `shells·2√2`; centers are generated a little beyond it.
pub fn gen_fcc(shells: usize) -> Result<Packing> {
    check_shells(shells)?;
    let half = half_width(shells, 2.0);
    let pts = fcc_points(half + PAD, 2.0);
    Packing::new(format!("fcc-{shells}"), Aabb::cube(Point3::ORIGIN, half), pts, true)
}

/// Hexagonal close packing (ABAB stacking along z), same domain convention as [`gen_fcc`].
pub fn gen_hcp(shells: usize) -> Result<Packing> {
    check_shells(shells)?;
    let half = half_width(shells, 2.0);
    let lim = half + PAD;
    let s3 = 3f64.sqrt();
    let c = 2.0 * (2.0f64 / 3.0).sqrt();
    let nz = (lim / c).ceil() as i64;
    let ny = (lim / s3).ceil() as i64 + 2;
    let mut pts = Vec::new();
    for m in -nz..=nz {
        let off = if m.rem_euclid(2) == 0 {
            Point3::ORIGIN
        } else {
            Point3::new(1.0, 1.0 / s3, 0.0)
        };
        for j in -ny..=ny {
            let nx = (lim / 2.0).ceil() as i64 + ny + 2;
            for i in -nx..=nx {
                let p = Point3::new(2.0 * i as f64 + j as f64, s3 * j as f64, c * m as f64) + off;
                if p.x.abs() <= lim && p.y.abs() <= lim && p.z.abs() <= lim {
                    pts.push(p);
                }
            }
        }
    }
    sort_points(&mut pts);
    Packing::new(format!("hcp-{shells}"), Aabb::cube(Point3::ORIGIN, half), pts, true)
}

/// Unit directions to the 12 vertices of a regular icosahedron, which are the
/// face-center directions of the dual dodecahedron.
pub(crate) fn icosahedron_directions() -> Vec<Point3> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut v = Vec::with_capacity(12);
    for s1 in [-1.0, 1.0] {
        for s2 in [-1.0, 1.0] {
            v.push(Point3::new(0.0, s1, s2 * phi));
            v.push(Point3::new(s1, s2 * phi, 0.0));
            v.push(Point3::new(s2 * phi, 0.0, s1));
        }
    }
    v.into_iter().map(|p| p / p.norm()).collect()
}

/// A central sphere touched by 12 spheres at the face centers of a circumscribed
/// regular dodecahedron. Local configuration; no saturation claim.
pub fn gen_dodecahedral() -> Result<Packing> {
    let mut pts = vec![Point3::ORIGIN];
    pts.extend(icosahedron_directions().into_iter().map(|d| d * 2.0));
    Packing::new("dodecahedral", Aabb::cube(Point3::ORIGIN, 4.0), pts, false)
}

/// Placement of the outer spheres of [`gen_pentagonal_prism`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrismParams {
    /// Distance of the pentagon vertices from the axis.
    pub radius: f64,
    /// Height of each pentagon above/below the central sphere.
    pub half_height: f64,
    /// Whether to add the two spheres on the axis.
    pub axial: bool,
}

impl Default for PrismParams {
    /// Pentagons at z = ±1 with radius √3 and axial spheres at z = ±2: every outer
    /// sphere touches the central one.
    fn default() -> Self {
        PrismParams { radius: 3f64.sqrt(), half_height: 1.0, axial: true }
    }
}

/// A central sphere surrounded by two aligned pentagons of spheres, optionally
/// capped by two axial spheres. Local configuration; no saturation claim.
pub fn gen_pentagonal_prism(params: PrismParams) -> Result<Packing> {
    let mut pts = vec![Point3::ORIGIN];
    for z in [-params.half_height, params.half_height] {
        for k in 0..5 {
            let a = 2.0 * std::f64::consts::PI * k as f64 / 5.0;
            pts.push(Point3::new(params.radius * a.cos(), params.radius * a.sin(), z));
        }
    }
    if params.axial {
        let z = params.half_height + (4.0 - params.radius * params.radius).max(0.0).sqrt();
        let z = z.max(2.0);
        pts.push(Point3::new(0.0, 0.0, z));
        pts.push(Point3::new(0.0, 0.0, -z));
    }
    Packing::new("pentagonal-prism", Aabb::cube(Point3::ORIGIN, 4.5), pts, false)
}

/// FCC with nearest-neighbor distance `spacing`, every center moved by a random
/// offset of length at most `jitter`. Requires `spacing − 2·jitter ≥ 2` and
/// `spacing/√2 + jitter < 2` so the result is a saturated packing.
pub fn gen_jittered_fcc(shells: usize, spacing: f64, jitter: f64, seed: u64) -> Result<Packing> {
    check_shells(shells)?;
    if spacing - 2.0 * jitter < 2.0 || spacing / 2f64.sqrt() + jitter >= 2.0 || jitter < 0.0 {
        return Err(Error::InvalidInput(format!(
            "spacing {spacing} and jitter {jitter} do not give a saturated packing"
        )));
    }
    let half = half_width(shells, 2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = fcc_points(half + PAD + spacing, spacing)
        .into_iter()
        .map(|p| {
            let d = loop {
                let d = Point3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                );
                if d.norm2() <= 1.0 {
                    break d;
                }
            };
            p + d * jitter
        })
        .collect();
    Packing::new(format!("jittered-fcc-{shells}-{seed}"), Aabb::cube(Point3::ORIGIN, half), pts, true)
}

/// Dynamic uniform grid used while inserting centers.
struct Grid {
    min: Point3,
    n: usize,
    cells: Vec<Vec<u32>>,
    pts: Vec<Point3>,
}

impl Grid {
    const CELL: f64 = 2.0;

    fn new(domain: &Aabb) -> Self {
        let n = (domain.extent().x.max(domain.extent().y).max(domain.extent().z) / Self::CELL).ceil() as usize + 1;
        Grid { min: domain.min, n, cells: vec![Vec::new(); n * n * n], pts: Vec::new() }
    }

    fn coord(&self, v: f64, k: usize) -> usize {
        (((v - self.min[k]) / Self::CELL).floor().max(0.0) as usize).min(self.n - 1)
    }

    fn nearest(&self, q: Point3, cap: f64) -> f64 {
        let mut best = cap * cap;
        let lo = [0, 1, 2].map(|k| self.coord(q[k] - cap, k));
        let hi = [0, 1, 2].map(|k| self.coord(q[k] + cap, k));
        for z in lo[2]..=hi[2] {
            for y in lo[1]..=hi[1] {
                for x in lo[0]..=hi[0] {
                    for &i in &self.cells[(z * self.n + y) * self.n + x] {
                        best = best.min(self.pts[i as usize].dist2(q));
                    }
                }
            }
        }
        best.sqrt()
    }

    fn fits(&self, q: Point3) -> bool {
        self.nearest(q, 2.0) >= 2.0
    }

    fn insert(&mut self, q: Point3) {
        let k = (self.coord(q.z, 2) * self.n + self.coord(q.y, 1)) * self.n + self.coord(q.x, 0);
        self.cells[k].push(self.pts.len() as u32);
        self.pts.push(q);
    }
}

/// Random sequential insertion in the cube `[0, edge]³` followed by hole filling
/// until no grid point of spacing 0.05 admits a new center. Deterministic per seed.
pub fn gen_random_saturated(edge: f64, seed: u64) -> Result<Packing> {
    if !(edge >= 8.0) {
        return Err(Error::InvalidInput(format!("box edge must be at least 8, got {edge}")));
    }
    let domain = Aabb::new(Point3::ORIGIN, Point3::new(edge, edge, edge));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grid = Grid::new(&domain);
    let mut misses = 0usize;
    let budget = 2000 + (edge * edge * edge) as usize / 4;
    while misses < budget {
        let q = Point3::new(
            rng.random_range(0.0..=edge),
            rng.random_range(0.0..=edge),
            rng.random_range(0.0..=edge),
        );
        if grid.fits(q) {
            grid.insert(q);
            misses = 0;
        } else {
            misses += 1;
        }
    }
    loop {
        let mut holes = scan_holes(&domain, SATURATION_SPACING, |q, cap| grid.nearest(q, cap));
        if holes.is_empty() {
            break;
        }
        holes.shuffle(&mut rng);
        for h in holes {
            if !grid.fits(h) {
                continue;
            }
            let j = SATURATION_SPACING / 2.0;
            let cand = Point3::new(
                (h.x + rng.random_range(-j..=j)).clamp(0.0, edge),
                (h.y + rng.random_range(-j..=j)).clamp(0.0, edge),
                (h.z + rng.random_range(-j..=j)).clamp(0.0, edge),
            );
            grid.insert(if grid.fits(cand) { cand } else { h });
        }
    }
    Packing::new(format!("random-{edge}-{seed}"), domain, grid.pts, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packing::validate;

    #[test]
    fn fcc_kissing_number() {
        let p = gen_fcc(2).unwrap();
        assert_eq!(p.centers[0], Point3::ORIGIN);
        let idx = p.index();
        let n = idx.within(Point3::ORIGIN, 2.0 + 1e-9).len() - 1;
        assert_eq!(n, 12);
        let r = validate(&p);
        assert!(r.ok(), "{r:?}");
        assert!((r.min_distance.unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn hcp_kissing_number() {
        let p = gen_hcp(2).unwrap();
        let idx = p.index();
        for i in 0..20 {
            assert_eq!(idx.within(p.centers[i], 2.0 + 1e-9).len() - 1, 12);
        }
        assert!(validate(&p).ok());
    }

    #[test]
    fn local_configurations_touch() {
        for p in [gen_dodecahedral().unwrap(), gen_pentagonal_prism(PrismParams::default()).unwrap()] {
            assert_eq!(p.len(), 13);
            for c in &p.centers[1..] {
                assert!((c.norm() - 2.0).abs() < 1e-12);
            }
            assert!(validate(&p).distance_ok);
        }
    }

    #[test]
    fn jitter_bounds_checked() {
        assert!(gen_jittered_fcc(2, 2.0, 0.1, 1).is_err());
        let p = gen_jittered_fcc(2, 2.2, 0.08, 1).unwrap();
        assert!(validate(&p).ok());
    }

    #[test]
    fn random_small_box_is_valid_and_deterministic() {
        let a = gen_random_saturated(9.0, 5).unwrap();
        let b = gen_random_saturated(9.0, 5).unwrap();
        assert_eq!(a, b);
        assert!(validate(&a).ok());
    }
}
