use std::collections::HashMap;

use crate::geometry::Aabb;

/// Buckets items by the grid cells their bounding boxes touch.
#[derive(Clone, Debug, Default)]
pub struct BoxGrid {
    cell: f64,
    buckets: HashMap<[i64; 3], Vec<u32>>,
    boxes: Vec<Aabb>,
}

impl BoxGrid {
    pub fn new(cell: f64) -> Self {
        BoxGrid { cell, buckets: HashMap::new(), boxes: Vec::new() }
    }

    fn range(&self, b: &Aabb) -> ([i64; 3], [i64; 3]) {
        let lo = [0, 1, 2].map(|k| (b.min[k] / self.cell).floor() as i64);
        let hi = [0, 1, 2].map(|k| (b.max[k] / self.cell).floor() as i64);
        (lo, hi)
    }

    /// Adds an item and returns its id.
    pub fn insert(&mut self, b: Aabb) -> usize {
        let id = self.boxes.len();
        let (lo, hi) = self.range(&b);
        for z in lo[2]..=hi[2] {
            for y in lo[1]..=hi[1] {
                for x in lo[0]..=hi[0] {
                    self.buckets.entry([x, y, z]).or_default().push(id as u32);
                }
            }
        }
        self.boxes.push(b);
        id
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn bbox(&self, id: usize) -> &Aabb {
        &self.boxes[id]
    }

    /// Ids whose boxes intersect `b`, ascending.
    pub fn query(&self, b: &Aabb) -> Vec<usize> {
        let (lo, hi) = self.range(b);
        let mut out = Vec::new();
        for z in lo[2]..=hi[2] {
            for y in lo[1]..=hi[1] {
                for x in lo[0]..=hi[0] {
                    if let Some(v) = self.buckets.get(&[x, y, z]) {
                        out.extend(v.iter().map(|&i| i as usize).filter(|&i| self.boxes[i].intersects(b)));
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point3;

    #[test]
    fn finds_overlapping_boxes_once() {
        let mut g = BoxGrid::new(1.0);
        let a = g.insert(Aabb::new(Point3::ORIGIN, Point3::new(3.0, 3.0, 3.0)));
        let b = g.insert(Aabb::new(Point3::new(5.0, 5.0, 5.0), Point3::new(6.0, 6.0, 6.0)));
        assert_eq!(g.query(&Aabb::cube(Point3::new(2.5, 2.5, 2.5), 0.2)), vec![a]);
        assert_eq!(g.query(&Aabb::new(Point3::ORIGIN, Point3::new(9.0, 9.0, 9.0))), vec![a, b]);
        assert!(g.query(&Aabb::cube(Point3::new(-5.0, 0.0, 0.0), 1.0)).is_empty());
    }
}
