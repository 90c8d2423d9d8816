//! Finite unit-sphere packings: storage, validation, generators and file format.

mod generate;
mod index;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use generate::{
    gen_dodecahedral, gen_fcc, gen_hcp, gen_jittered_fcc, gen_pentagonal_prism, gen_random_saturated,
    PrismParams,
};
pub use index::NeighborIndex;

use crate::constants::interior_margin;
use crate::error::{Error, Result};
use crate::geometry::{Aabb, Point3};

/// Minimum center distance, with rounding slack.
pub const MIN_DISTANCE: f64 = 2.0 - 1e-12;
/// Grid spacing of the saturation scan.
pub const SATURATION_SPACING: f64 = 0.05;

/// Sphere centers together with the box on which saturation is claimed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Packing {
    pub label: String,
    pub domain: Aabb,
    pub centers: Vec<Point3>,
    /// False for local configurations that make no saturation claim.
    #[serde(default = "default_true")]
    pub saturated: bool,
}

fn default_true() -> bool {
    true
}

impl Packing {
    /// Builds a packing, checking finiteness and the minimum distance.
    pub fn new(label: impl Into<String>, domain: Aabb, centers: Vec<Point3>, saturated: bool) -> Result<Self> {
        let p = Packing { label: label.into(), domain, centers, saturated };
        p.check_basic()?;
        Ok(p)
    }

    fn check_basic(&self) -> Result<()> {
        if !self.domain.min.is_finite() || !self.domain.max.is_finite() {
            return Err(Error::InvalidInput("domain is not finite".into()));
        }
        if (0..3).any(|k| self.domain.min[k] > self.domain.max[k]) {
            return Err(Error::InvalidInput("domain min exceeds max".into()));
        }
        if let Some(i) = self.centers.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!("center {i} is not finite")));
        }
        if let Some((i, j, d)) = closest_pair(&self.centers) {
            if d < MIN_DISTANCE {
                return Err(Error::Overlap { i, j, distance: d });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn index(&self) -> NeighborIndex {
        NeighborIndex::new(&self.centers)
    }

    /// Distance from center `i` to the boundary of the domain (negative outside).
    pub fn depth(&self, i: usize) -> f64 {
        self.domain.depth(self.centers[i])
    }

    /// Whether center `i` is far enough inside the domain for local computations.
    pub fn is_interior(&self, i: usize) -> bool {
        self.depth(i) >= interior_margin() - 1e-9
    }

    /// Errors with [`Error::Locality`] unless `i` is interior.
    pub fn require_interior(&self, i: usize) -> Result<()> {
        if self.is_interior(i) {
            Ok(())
        } else {
            Err(Error::Locality { vertex: i, distance: self.depth(i), required: interior_margin() })
        }
    }

    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_interior(i)).collect()
    }

    /// The same packing moved by `by`.
    pub fn translated(&self, by: Point3) -> Packing {
        Packing {
            label: self.label.clone(),
            domain: Aabb::new(self.domain.min + by, self.domain.max + by),
            centers: self.centers.iter().map(|&c| c + by).collect(),
            saturated: self.saturated,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let p: Packing = serde_json::from_str(s)?;
        p.check_basic()?;
        Ok(p)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// Closest pair of points, if there are at least two.
pub fn closest_pair(pts: &[Point3]) -> Option<(usize, usize, f64)> {
    if pts.len() < 2 {
        return None;
    }
    let idx = NeighborIndex::new(pts);
    let mut best: Option<(usize, usize, f64)> = None;
    let mut r = 2.5;
    loop {
        for (i, &p) in pts.iter().enumerate() {
            idx.for_each_within(p, r, |j, d2| {
                if j > i && best.map_or(true, |b| d2 < b.2) {
                    best = Some((i, j, d2));
                }
            });
        }
        if let Some((i, j, d2)) = best {
            return Some((i, j, d2.sqrt()));
        }
        r *= 4.0;
    }
}

/// Outcome of [`validate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub centers: usize,
    pub min_distance: Option<f64>,
    pub closest_pair: Option<(usize, usize)>,
    pub distance_ok: bool,
    pub saturation_checked: bool,
    pub grid_spacing: f64,
    /// Number of grid points farther than 2 from every center.
    pub hole_count: usize,
    /// A few of those points; each is a position where a new sphere fits.
    pub holes: Vec<Point3>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.distance_ok && self.hole_count == 0
    }

    /// Converts failures into the corresponding error.
    pub fn into_result(self) -> Result<Self> {
        if !self.distance_ok {
            let (i, j) = self.closest_pair.unwrap_or((0, 0));
            return Err(Error::Overlap { i, j, distance: self.min_distance.unwrap_or(0.0) });
        }
        if let Some(h) = self.holes.first() {
            return Err(Error::NotSaturated { x: h.x, y: h.y, z: h.z });
        }
        Ok(self)
    }
}

/// Checks the minimum distance and, for packings claiming it, saturation on a
/// grid of spacing 0.05 over the domain.
pub fn validate(p: &Packing) -> ValidationReport {
    let cp = closest_pair(&p.centers);
    let mut rep = ValidationReport {
        centers: p.len(),
        min_distance: cp.map(|c| c.2),
        closest_pair: cp.map(|c| (c.0, c.1)),
        distance_ok: cp.map_or(true, |c| c.2 >= MIN_DISTANCE),
        saturation_checked: p.saturated,
        grid_spacing: SATURATION_SPACING,
        hole_count: 0,
        holes: Vec::new(),
    };
    if p.saturated {
        let idx = p.index();
        let holes = scan_holes(&p.domain, SATURATION_SPACING, |q, cap| idx.nearest_distance_capped(q, cap));
        rep.hole_count = holes.len();
        rep.holes = holes.into_iter().take(16).collect();
    }
    rep
}

/// Grid points of spacing `h` over `domain` that lie at distance ≥ 2 from every
/// center. `nearest(q, cap)` must return min(cap, distance to the nearest center).
pub(crate) fn scan_holes<F: Fn(Point3, f64) -> f64>(domain: &Aabb, h: f64, nearest: F) -> Vec<Point3> {
    let e = domain.extent();
    let n = [0, 1, 2].map(|k| (e[k] / h).ceil() as usize + 1);
    let step = [0, 1, 2].map(|k| if n[k] > 1 { e[k] / (n[k] - 1) as f64 } else { 0.0 });
    let mut holes = Vec::new();
    let mut stack = vec![([0usize; 3], n)];
    while let Some((lo, hi)) = stack.pop() {
        let span = [0, 1, 2].map(|k| hi[k] - lo[k]);
        let c = Point3::new(
            domain.min.x + step[0] * (lo[0] + hi[0] - 1) as f64 / 2.0,
            domain.min.y + step[1] * (lo[1] + hi[1] - 1) as f64 / 2.0,
            domain.min.z + step[2] * (lo[2] + hi[2] - 1) as f64 / 2.0,
        );
        let r = 0.5
            * Point3::new(
                step[0] * (span[0] - 1) as f64,
                step[1] * (span[1] - 1) as f64,
                step[2] * (span[2] - 1) as f64,
            )
            .norm();
        let d = nearest(c, 2.0 + r + 1.0);
        if d + r < 2.0 {
            continue;
        }
        if span == [1, 1, 1] {
            if d >= 2.0 + 1e-9 {
                holes.push(c);
            }
            continue;
        }
        let k = (0..3).max_by_key(|&k| span[k]).unwrap();
        let mid = lo[k] + span[k] / 2;
        let (mut a, mut b) = (hi, lo);
        a[k] = mid;
        b[k] = mid;
        stack.push((lo, a));
        stack.push((b, hi));
    }
    holes.sort_by(|a, b| a.lex_cmp(b));
    holes
}
