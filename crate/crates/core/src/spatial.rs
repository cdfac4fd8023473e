//! Uniform bin grid over axis-aligned boxes.
//!
//! Each item is registered in every bin its box touches. Queries visit the
//! bins overlapped by the query region, deduplicate and filter exactly, so
//! the result always equals an exhaustive scan. When a query would visit more
//! bins than there are items the index falls back to scanning all items.

use alloc::vec::Vec;

use libm::{floor, pow};

use crate::geometry::{Aabb, Point};

#[derive(Debug, Clone)]
pub struct SpatialIndex<const D: usize> {
    boxes: Vec<Aabb<D>>,
    bounds: Option<Aabb<D>>,
    cell: f64,
    dims: [usize; D],
    bin_start: Vec<u32>,
    bin_items: Vec<u32>,
}

impl<const D: usize> SpatialIndex<D> {
    pub fn from_points(points: &[Point<D>], cell_size: Option<f64>) -> Self {
        Self::from_boxes(points.iter().map(|p| Aabb::point(*p)).collect(), cell_size)
    }

    /// Builds the index. Without an explicit `cell_size` the bin width is
    /// chosen so that bins hold about one item on average.
    pub fn from_boxes(boxes: Vec<Aabb<D>>, cell_size: Option<f64>) -> Self {
        let Some(bounds) = boxes.iter().copied().reduce(|a, b| a.union(&b)) else {
            return Self {
                boxes,
                bounds: None,
                cell: 1.0,
                dims: [1; D],
                bin_start: alloc::vec![0, 0],
                bin_items: Vec::new(),
            };
        };
        let n = boxes.len();
        let extent: [f64; D] = core::array::from_fn(|i| bounds.max[i] - bounds.min[i]);
        let max_extent = extent.iter().copied().fold(0.0, f64::max);
        let mut cell = match cell_size {
            Some(c) if c > 0.0 => c,
            _ => {
                let mean_item: f64 = boxes
                    .iter()
                    .map(|b| (0..D).map(|i| b.max[i] - b.min[i]).fold(0.0, f64::max))
                    .sum::<f64>()
                    / n as f64;
                let volume: f64 = extent.iter().map(|e| e.max(max_extent * 1e-3)).product();
                pow(volume / n as f64, 1.0 / D as f64).max(mean_item)
            }
        };
        if !(cell > 0.0) {
            cell = 1.0;
        }
        // keep the grid at O(n) bins
        let max_bins = (4 * n + 64) as f64;
        loop {
            let bins: f64 = extent.iter().map(|e| floor(e / cell) + 1.0).product();
            if bins <= max_bins {
                break;
            }
            cell *= 1.5;
        }
        let dims: [usize; D] = core::array::from_fn(|i| floor(extent[i] / cell) as usize + 1);
        let mut index = Self {
            boxes,
            bounds: Some(bounds),
            cell,
            dims,
            bin_start: Vec::new(),
            bin_items: Vec::new(),
        };
        let total: usize = dims.iter().product();
        let mut counts = alloc::vec![0u32; total + 1];
        for b in &index.boxes {
            index.for_each_bin(b, |bin| counts[bin + 1] += 1);
        }
        for i in 0..total {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut items = alloc::vec![0u32; counts[total] as usize];
        for (id, b) in index.boxes.iter().enumerate() {
            index.for_each_bin(b, |bin| {
                items[fill[bin] as usize] = id as u32;
                fill[bin] += 1;
            });
        }
        index.bin_start = counts;
        index.bin_items = items;
        index
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn item(&self, id: usize) -> &Aabb<D> {
        &self.boxes[id]
    }

    fn bin_range(&self, b: &Aabb<D>) -> Option<([usize; D], [usize; D])> {
        let bounds = self.bounds?;
        if !bounds.intersects(b) {
            return None;
        }
        let lo = core::array::from_fn(|i| self.coord(b.min[i], i, &bounds));
        let hi = core::array::from_fn(|i| self.coord(b.max[i], i, &bounds));
        Some((lo, hi))
    }

    #[inline]
    fn coord(&self, x: f64, axis: usize, bounds: &Aabb<D>) -> usize {
        let c = floor((x - bounds.min[axis]) / self.cell);
        if c <= 0.0 {
            0
        } else {
            (c as usize).min(self.dims[axis] - 1)
        }
    }

    fn for_each_bin(&self, b: &Aabb<D>, mut f: impl FnMut(usize)) {
        let Some((lo, hi)) = self.bin_range(b) else { return };
        let mut idx = lo;
        loop {
            let mut flat = 0;
            for axis in (0..D).rev() {
                flat = flat * self.dims[axis] + idx[axis];
            }
            f(flat);
            let mut axis = 0;
            loop {
                if axis == D {
                    return;
                }
                if idx[axis] < hi[axis] {
                    idx[axis] += 1;
                    break;
                }
                idx[axis] = lo[axis];
                axis += 1;
            }
        }
    }

    /// Ids of all items whose box intersects `query`, sorted ascending.
    pub fn query_box(&self, query: &Aabb<D>) -> Vec<u32> {
        let mut out = Vec::new();
        self.query_box_into(query, &mut out);
        out
    }

    /// Like [`query_box`](Self::query_box) but reuses `out`.
    pub fn query_box_into(&self, query: &Aabb<D>, out: &mut Vec<u32>) {
        out.clear();
        let Some((lo, hi)) = self.bin_range(query) else { return };
        let visited: usize = (0..D).map(|i| hi[i] - lo[i] + 1).product();
        if visited > self.boxes.len() {
            out.extend(
                self.boxes
                    .iter()
                    .enumerate()
                    .filter(|(_, b)| b.intersects(query))
                    .map(|(i, _)| i as u32),
            );
            return;
        }
        self.for_each_bin(query, |bin| {
            let (s, e) = (self.bin_start[bin] as usize, self.bin_start[bin + 1] as usize);
            for &id in &self.bin_items[s..e] {
                if self.boxes[id as usize].intersects(query) {
                    out.push(id);
                }
            }
        });
        out.sort_unstable();
        out.dedup();
    }

    /// Ids of all items whose box comes within `radius` of `center`.
    pub fn query_ball(&self, center: &Point<D>, radius: f64) -> Vec<u32> {
        let mut out = self.query_box(&Aabb::point(*center).inflate(radius));
        out.retain(|&id| self.boxes[id as usize].distance_to(center) <= radius);
        out
    }

    /// Ids of all items whose box contains `p`.
    pub fn query_point(&self, p: &Point<D>) -> Vec<u32> {
        self.query_box(&Aabb::point(*p))
    }
}

pub fn build_index<const D: usize>(items: Vec<Aabb<D>>) -> SpatialIndex<D> {
    SpatialIndex::from_boxes(items, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_index_returns_nothing() {
        let idx = SpatialIndex::<2>::from_boxes(Vec::new(), None);
        assert!(idx.query_box(&Aabb { min: [-1e9; 2], max: [1e9; 2] }).is_empty());
        assert!(idx.query_ball(&[0.0, 0.0], 10.0).is_empty());
    }

    #[test]
    fn covering_query_returns_all() {
        let pts: Vec<[f64; 2]> = (0..50).map(|i| [i as f64 * 0.02, (i * 7 % 50) as f64 * 0.02]).collect();
        let idx = SpatialIndex::from_points(&pts, None);
        let all = idx.query_box(&Aabb { min: [-1.0; 2], max: [2.0; 2] });
        assert_eq!(all, (0..50).collect::<Vec<u32>>());
    }

    #[test]
    fn boxes_spanning_many_bins_are_reported_once() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let boxes: Vec<Aabb<3>> = (0..300)
            .map(|_| {
                let c: [f64; 3] = core::array::from_fn(|_| rng.gen::<f64>());
                let r = rng.gen::<f64>() * 0.2;
                Aabb::point(c).inflate(r)
            })
            .collect();
        let idx = SpatialIndex::from_boxes(boxes.clone(), Some(0.05));
        for _ in 0..50 {
            let c: [f64; 3] = core::array::from_fn(|_| rng.gen::<f64>());
            let q = Aabb::point(c).inflate(rng.gen::<f64>() * 0.3);
            let expected: Vec<u32> = (0..boxes.len() as u32).filter(|&i| boxes[i as usize].intersects(&q)).collect();
            assert_eq!(idx.query_box(&q), expected);
        }
    }
}
