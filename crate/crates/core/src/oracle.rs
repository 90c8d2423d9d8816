//! Seeded Monte Carlo estimators, used as independent checks of the exact
//! volume and compression computations.
//!
//! Sampling is stratified over the pieces of a region: each piece draws from its
//! own bounding box with a generator seeded from the master seed and the piece
//! index, so results do not depend on thread scheduling.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::delta_oct;
use crate::decomposition::spatial::BoxGrid;
use crate::decomposition::Decomposition;
use crate::error::{Error, Result};
use crate::geometry::{Aabb, ConvexPolyhedron, Point3, Region, Tetra};
use crate::packing::NeighborIndex;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n: usize,
    pub seed: u64,
}

impl McEstimate {
    /// (value − exact)/stderr; infinite when the error is zero-variance but wrong.
    pub fn z_score(&self, exact: f64) -> f64 {
        let d = self.value - exact;
        if self.stderr > 0.0 {
            d / self.stderr
        } else if d.abs() <= 1e-12 * exact.abs().max(1.0) {
            0.0
        } else {
            f64::INFINITY * d.signum()
        }
    }

    /// Whether `exact` lies within `k` standard errors.
    pub fn agrees(&self, exact: f64, k: f64) -> bool {
        self.z_score(exact).abs() <= k
    }

    /// Errors with the estimate when it misses `expected` by more than `k` standard errors.
    pub fn require(&self, expected: f64, k: f64) -> Result<()> {
        if self.agrees(expected, k) {
            Ok(())
        } else {
            Err(Error::ToleranceNotMet { estimate: self.value, stderr: self.stderr, expected })
        }
    }
}

/// Seed of stream `i` derived from `seed` (SplitMix64 finalizer).
pub fn split_seed(seed: u64, i: u64) -> u64 {
    let mut z = seed ^ i.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn sample_box(rng: &mut ChaCha8Rng, b: &Aabb) -> Point3 {
    Point3::new(
        rng.random_range(b.min.x..=b.max.x),
        rng.random_range(b.min.y..=b.max.y),
        rng.random_range(b.min.z..=b.max.z),
    )
}

/// Per-piece sums of a sampled quantity: (Σ y, Σ y², count) with y scaled by the
/// box volume.
fn stratified<F>(r: &Region, n: usize, seed: u64, f: F) -> Result<McEstimate>
where
    F: Fn(&ConvexPolyhedron, Point3) -> f64 + Sync,
{
    if n == 0 {
        return Err(Error::InvalidInput("sample count must be positive".into()));
    }
    let boxes: Vec<Aabb> = r.pieces.iter().map(|p| p.bbox()).collect();
    let total: f64 = boxes.iter().map(|b| b.volume()).sum();
    if r.pieces.is_empty() {
        return Ok(McEstimate { value: 0.0, stderr: 0.0, n: 0, seed });
    }
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::Degenerate("region bounding boxes have no volume"));
    }
    let parts: Vec<(f64, f64, usize)> = r
        .pieces
        .par_iter()
        .zip(boxes.par_iter())
        .enumerate()
        .map(|(i, (piece, b))| {
            let vol = b.volume();
            let m = ((n as f64 * vol / total).round() as usize).max(1);
            if vol <= 0.0 {
                return (0.0, 0.0, m);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(split_seed(seed, i as u64));
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..m {
                let x = sample_box(&mut rng, b);
                let y = f(piece, x);
                s += y;
                s2 += y * y;
            }
            let mean = s / m as f64;
            let var = if m > 1 { (s2 / m as f64 - mean * mean).max(0.0) * m as f64 / (m - 1) as f64 } else { 0.0 };
            (vol * mean, vol * vol * var / m as f64, m)
        })
        .collect();
    let value = parts.iter().map(|p| p.0).sum();
    let var: f64 = parts.iter().map(|p| p.1).sum();
    let count = parts.iter().map(|p| p.2).sum();
    Ok(McEstimate { value, stderr: var.sqrt(), n: count, seed })
}

/// Hit-or-miss volume.
pub fn mc_volume(r: &Region, n: usize, seed: u64) -> Result<McEstimate> {
    stratified(r, n, seed, |piece, x| if piece.contains(x, 0.0) { 1.0 } else { 0.0 })
}

fn covered(idx: &NeighborIndex, x: Point3) -> bool {
    let mut hit = false;
    idx.for_each_within(x, 1.0, |_, d2| hit |= d2 <= 1.0);
    hit
}

/// Volume of the region covered by unit balls at `centers`.
pub fn mc_covered_volume(r: &Region, centers: &[Point3], n: usize, seed: u64) -> Result<McEstimate> {
    let idx = NeighborIndex::new(centers);
    stratified(r, n, seed, |piece, x| {
        if piece.contains(x, 0.0) && covered(&idx, x) {
            1.0
        } else {
            0.0
        }
    })
}

/// Compression: covered volume − δ_oct·volume, with each sample contributing
/// 1 − δ_oct when covered and −δ_oct otherwise.
pub fn mc_compression(r: &Region, centers: &[Point3], n: usize, seed: u64) -> Result<McEstimate> {
    let idx = NeighborIndex::new(centers);
    let d = delta_oct();
    stratified(r, n, seed, |piece, x| {
        if !piece.contains(x, 0.0) {
            0.0
        } else if covered(&idx, x) {
            1.0 - d
        } else {
            -d
        }
    })
}

/// Solid angle of `t` at vertex `k` from uniformly distributed directions.
pub fn mc_solid_angle(t: &Tetra, k: usize, n: usize, seed: u64) -> Result<McEstimate> {
    if n == 0 {
        return Err(Error::InvalidInput("sample count must be positive".into()));
    }
    let v = t.vertex(k);
    let e: Vec<Point3> = (1..4).map(|i| t.vertex((k + i) % 4) - v).collect();
    let det = crate::geometry::det3(e[0], e[1], e[2]);
    if det.abs() < 1e-14 {
        return Err(Error::Degenerate("flat tetrahedron"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..n {
        // Uniform on the sphere: z uniform in [−1, 1] (Archimedes), azimuth uniform.
        let z: f64 = rng.random_range(-1.0..=1.0);
        let phi: f64 = rng.random_range(0.0..2.0 * PI);
        let s = (1.0 - z * z).max(0.0).sqrt();
        let d = Point3::new(s * phi.cos(), s * phi.sin(), z);
        let l = [
            crate::geometry::det3(d, e[1], e[2]) / det,
            crate::geometry::det3(e[0], d, e[2]) / det,
            crate::geometry::det3(e[0], e[1], d) / det,
        ];
        if l.iter().all(|&x| x >= 0.0) {
            hits += 1;
        }
    }
    let f = hits as f64 / n as f64;
    Ok(McEstimate {
        value: 4.0 * PI * f,
        stderr: 4.0 * PI * (f * (1.0 - f) / n as f64).sqrt(),
        n,
        seed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub samples: usize,
    /// Points in no region.
    pub uncovered: usize,
    /// Points in more than one region.
    pub multiple: usize,
    pub failure_rate: f64,
    /// Up to 16 failing points with their region counts.
    pub examples: Vec<(Point3, usize)>,
}

/// Distance beyond which a V-cell cannot reach a sample point.
const CELL_REACH: f64 = 8.0;

/// Samples points of `b` and counts how many regions of the hybrid partition
/// (D-system tetrahedra and V-cells) contain each. The box grown by 8 must lie
/// in the decomposition focus.
pub fn mc_partition_coverage(dec: &Decomposition, b: &Aabb, n: usize, seed: u64) -> Result<CoverageReport> {
    let p = &dec.packing;
    if let Some(f) = dec.focus {
        if !f.contains_box(&b.inflate(CELL_REACH), 1e-9) {
            return Err(Error::InsufficientMargin("sample box is too close to the focus boundary".into()));
        }
    }
    let reach = b.inflate(CELL_REACH);
    let owners: Vec<usize> = dec
        .index
        .within(b.center(), 0.5 * reach.extent().norm())
        .into_iter()
        .filter(|&v| reach.contains(p.centers[v]))
        .collect();
    let cells: Vec<Region> = owners
        .par_iter()
        .map(|&v| dec.v_cell(v).map(|c| c.region))
        .collect::<Result<_>>()?;
    let mut grid = BoxGrid::new(3.0);
    let mut piece_of = Vec::new();
    for (ci, r) in cells.iter().enumerate() {
        for (pi, q) in r.pieces.iter().enumerate() {
            grid.insert(q.bbox());
            piece_of.push((ci, pi));
        }
    }
    let tetra: Vec<Tetra> = dec.dsystem.tetra.iter().map(|d| d.tetra(p)).collect();
    const CHUNK: usize = 1 << 14;
    let chunks = n.div_ceil(CHUNK);
    // Per chunk: uncovered count, multiply covered count, examples.
    type Tally = (usize, usize, Vec<(Point3, usize)>);
    let rows: Vec<Tally> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(split_seed(seed, c as u64));
            let m = CHUNK.min(n - c * CHUNK);
            let (mut zero, mut many, mut ex) = (0, 0, Vec::new());
            for _ in 0..m {
                let x = sample_box(&mut rng, b);
                let pt = Aabb::new(x, x);
                let mut count = dec.dsystem.near(&pt).iter().filter(|&&t| tetra[t].contains(x, 0.0)).count();
                count += grid
                    .query(&pt)
                    .iter()
                    .filter(|&&g| {
                        let (ci, pi) = piece_of[g];
                        cells[ci].pieces[pi].contains(x, 0.0)
                    })
                    .count();
                if count != 1 {
                    if count == 0 {
                        zero += 1;
                    } else {
                        many += 1;
                    }
                    if ex.len() < 16 {
                        ex.push((x, count));
                    }
                }
            }
            (zero, many, ex)
        })
        .collect();
    let uncovered = rows.iter().map(|r| r.0).sum();
    let multiple = rows.iter().map(|r| r.1).sum();
    let examples = rows.into_iter().flat_map(|r| r.2).take(16).collect();
    Ok(CoverageReport {
        samples: n,
        uncovered,
        multiple,
        failure_rate: (uncovered + multiple) as f64 / n.max(1) as f64,
        examples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::KAPPA3;

    fn cube(h: f64) -> Region {
        Region::new(None, vec![ConvexPolyhedron::from_box(&Aabb::cube(Point3::ORIGIN, h))])
    }

    #[test]
    fn unit_cube_volume_is_exact() {
        let e = mc_volume(&cube(0.5), 1000, 1).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn inscribed_ball() {
        let e = mc_covered_volume(&cube(1.0), &[Point3::ORIGIN], 200_000, 7).unwrap();
        assert!(e.agrees(KAPPA3, 4.0), "{e:?}");
    }

    #[test]
    fn same_seed_same_bits() {
        let r = cube(1.0);
        let a = mc_compression(&r, &[Point3::ORIGIN], 10_000, 3).unwrap();
        let b = mc_compression(&r, &[Point3::ORIGIN], 10_000, 3).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_ne!(a.value, mc_compression(&r, &[Point3::ORIGIN], 10_000, 4).unwrap().value);
    }

    #[test]
    fn octant_solid_angle() {
        let t = crate::geometry::tetra::tests::corner();
        let e = mc_solid_angle(&t, 0, 200_000, 11).unwrap();
        assert!(e.agrees(PI / 2.0, 4.0), "{e:?}");
    }

    #[test]
    fn empty_sample_count_is_rejected() {
        assert!(mc_volume(&cube(1.0), 0, 0).is_err());
    }
}
