use crate::geometry::{Aabb, Point3};

/// Uniform-grid spatial index over a fixed point set.
#[derive(Clone, Debug)]
pub struct NeighborIndex {
    cell: f64,
    origin: Point3,
    dims: [usize; 3],
    starts: Vec<u32>,
    items: Vec<u32>,
    points: Vec<Point3>,
}

impl NeighborIndex {
    pub const DEFAULT_CELL: f64 = 2.0;

    pub fn new(points: &[Point3]) -> Self {
        Self::with_cell(points, Self::DEFAULT_CELL)
    }

    pub fn with_cell(points: &[Point3], cell: f64) -> Self {
        let bb = Aabb::from_points(points.iter().copied())
            .unwrap_or(Aabb::new(Point3::ORIGIN, Point3::ORIGIN));
        let e = bb.extent();
        let dims = [0, 1, 2].map(|k| ((e[k] / cell).floor() as usize + 1).max(1));
        let ncell = dims[0] * dims[1] * dims[2];
        let mut idx = Self {
            cell,
            origin: bb.min,
            dims,
            starts: vec![0; ncell + 1],
            items: vec![0; points.len()],
            points: points.to_vec(),
        };
        let keys: Vec<usize> = points.iter().map(|&p| idx.key(idx.coords(p))).collect();
        for &k in &keys {
            idx.starts[k + 1] += 1;
        }
        for i in 0..ncell {
            idx.starts[i + 1] += idx.starts[i];
        }
        let mut fill = idx.starts.clone();
        for (i, &k) in keys.iter().enumerate() {
            idx.items[fill[k] as usize] = i as u32;
            fill[k] += 1;
        }
        idx
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn coords(&self, p: Point3) -> [i64; 3] {
        [0, 1, 2].map(|k| ((p[k] - self.origin[k]) / self.cell).floor() as i64)
    }

    fn key(&self, c: [i64; 3]) -> usize {
        let c = [0, 1, 2].map(|k| c[k].clamp(0, self.dims[k] as i64 - 1) as usize);
        (c[2] * self.dims[1] + c[1]) * self.dims[0] + c[0]
    }

    /// Calls `f(index, distance²)` for every point within distance `r` of `p`.
    pub fn for_each_within<F: FnMut(usize, f64)>(&self, p: Point3, r: f64, mut f: F) {
        if self.points.is_empty() {
            return;
        }
        let r2 = r * r;
        let lo = self.coords(p - Point3::new(r, r, r));
        let hi = self.coords(p + Point3::new(r, r, r));
        let clampk = |v: i64, k: usize| v.clamp(0, self.dims[k] as i64 - 1);
        if (0..3).any(|k| hi[k] < 0 || lo[k] >= self.dims[k] as i64) {
            return;
        }
        for z in clampk(lo[2], 2)..=clampk(hi[2], 2) {
            for y in clampk(lo[1], 1)..=clampk(hi[1], 1) {
                let row = (z as usize * self.dims[1] + y as usize) * self.dims[0];
                let (x0, x1) = (clampk(lo[0], 0) as usize, clampk(hi[0], 0) as usize);
                let (s, e) = (self.starts[row + x0] as usize, self.starts[row + x1 + 1] as usize);
                for &i in &self.items[s..e] {
                    let d2 = self.points[i as usize].dist2(p);
                    if d2 <= r2 {
                        f(i as usize, d2);
                    }
                }
            }
        }
    }

    /// Indices of points within distance `r` of `p`, ascending.
    pub fn within(&self, p: Point3, r: f64) -> Vec<usize> {
        let mut v = Vec::new();
        self.for_each_within(p, r, |i, _| v.push(i));
        v.sort_unstable();
        v
    }

    /// Nearest point and its distance.
    pub fn nearest(&self, p: Point3) -> Option<(usize, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let mut r = self.cell;
        loop {
            let mut best: Option<(usize, f64)> = None;
            self.for_each_within(p, r, |i, d2| {
                if best.map_or(true, |(_, b)| d2 < b) {
                    best = Some((i, d2));
                }
            });
            if let Some((i, d2)) = best {
                return Some((i, d2.sqrt()));
            }
            r *= 2.0;
        }
    }

    /// Distance from `p` to the nearest point, capped at `cap`.
    pub fn nearest_distance_capped(&self, p: Point3, cap: f64) -> f64 {
        let mut best = cap * cap;
        self.for_each_within(p, cap, |_, d2| best = best.min(d2));
        best.sqrt()
    }
}
