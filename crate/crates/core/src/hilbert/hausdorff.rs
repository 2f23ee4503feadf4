use rayon::prelude::*;

use super::cloud::Cloud;
use super::point::{metric_bounded, metric_slices};
use crate::error::{domain, Result};
use crate::scalar::Real;

/// k-d tree over a cloud for nearest-point queries in the product metric.
///
/// The metric is a weighted L1 sum, so the distance from a query to a
/// node's bounding box (each coordinate gap times its weight) bounds the
/// distance to every point below it.
pub struct PointIndex<'a, S> {
    cloud: &'a Cloud<S>,
    dim: usize,
    order: Vec<usize>,
    nodes: Vec<Node>,
    boxes: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
struct Node {
    start: usize,
    end: usize,
    children: Option<(usize, usize)>,
}

const LEAF: usize = 12;

/// Bounds are shrunk by this relative and absolute slack before pruning, so
/// rounding in the bound never discards the true nearest point.
fn prunes(lb: f64, best: f64) -> bool {
    lb * (1.0 - 1e-9) - 1e-15 > best
}

fn weight(k: usize) -> f64 {
    0.5f64.powi(k as i32 + 1)
}

impl<'a, S: Real> PointIndex<'a, S> {
    pub fn new(cloud: &'a Cloud<S>) -> Self {
        let dim = cloud.dim().max(1);
        let mut index = Self { cloud, dim, order: (0..cloud.len()).collect(), nodes: Vec::new(), boxes: Vec::new() };
        if !cloud.is_empty() {
            index.build(0, cloud.len());
        }
        index
    }

    fn coord(&self, i: usize, k: usize) -> f64 {
        self.cloud.point(i).get(k).map_or(0.0, |c| c.as_f64())
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node { start, end, children: None });
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for &i in &self.order[start..end] {
            for k in 0..self.dim {
                let c = self.coord(i, k);
                lo[k] = lo[k].min(c);
                hi[k] = hi[k].max(c);
            }
        }
        let axis = (0..self.dim)
            .max_by(|&a, &b| ((hi[a] - lo[a]) * weight(a)).partial_cmp(&((hi[b] - lo[b]) * weight(b))).unwrap().then(b.cmp(&a)))
            .unwrap();
        let flat = hi[axis] <= lo[axis];
        self.boxes.extend(lo);
        self.boxes.extend(hi);
        if end - start <= LEAF || flat {
            return id;
        }
        let mid = (start + end) / 2;
        let cloud = self.cloud;
        let key = |i: &usize| cloud.point(*i).get(axis).map_or(0.0, |c| c.as_f64());
        self.order[start..end].select_nth_unstable_by(mid - start, |a, b| key(a).partial_cmp(&key(b)).unwrap());
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        self.nodes[id].children = Some((left, right));
        id
    }

    fn lower_bound(&self, node: usize, q: &[f64]) -> f64 {
        let base = node * 2 * self.dim;
        let (lo, hi) = (&self.boxes[base..base + self.dim], &self.boxes[base + self.dim..base + 2 * self.dim]);
        let mut lb = 0.0;
        for k in 0..q.len().max(self.dim) {
            let v = q.get(k).copied().unwrap_or(0.0);
            let gap = if k < self.dim {
                if v < lo[k] {
                    lo[k] - v
                } else if v > hi[k] {
                    v - hi[k]
                } else {
                    0.0
                }
            } else {
                v.abs()
            };
            lb += weight(k) * gap;
        }
        lb
    }

    /// Distance from `q` to the nearest indexed point, or `None` when every
    /// point is provably farther than `cutoff`.
    pub fn nearest_within(&self, q: &[S], cutoff: Option<S>) -> Option<S> {
        self.search(q, cutoff, false)
    }

    /// True when some indexed point lies within `t` of `q`; stops at the first.
    pub fn any_within(&self, q: &[S], t: S) -> bool {
        self.search(q, Some(t), true).is_some()
    }

    pub fn nearest(&self, q: &[S]) -> S {
        self.nearest_within(q, None).expect("index is nonempty")
    }

    fn search(&self, q: &[S], cutoff: Option<S>, first: bool) -> Option<S> {
        if self.nodes.is_empty() {
            return None;
        }
        let qf: Vec<f64> = q.iter().map(|c| c.as_f64()).collect();
        let mut best: Option<S> = None;
        let mut stack = vec![(0usize, self.lower_bound(0, &qf))];
        while let Some((node, lb)) = stack.pop() {
            let bound = best.or(cutoff);
            if bound.is_some_and(|b| prunes(lb, b.as_f64())) {
                continue;
            }
            let Node { start, end, children } = self.nodes[node];
            match children {
                Some((l, r)) => {
                    let (lbl, lbr) = (self.lower_bound(l, &qf), self.lower_bound(r, &qf));
                    // Nearer child on top of the stack.
                    if lbl <= lbr {
                        stack.push((r, lbr));
                        stack.push((l, lbl));
                    } else {
                        stack.push((l, lbl));
                        stack.push((r, lbr));
                    }
                }
                None => {
                    for &idx in &self.order[start..end] {
                        let p = self.cloud.point(idx);
                        let d = match best.or(cutoff) {
                            Some(b) => metric_bounded(q, p, b),
                            None => Some(metric_slices(q, p)),
                        };
                        if let Some(d) = d {
                            if first {
                                return Some(d);
                            }
                            if best.is_none_or(|b| d < b) {
                                best = Some(d);
                            }
                        }
                    }
                }
            }
        }
        best
    }
}

/// sup over `a` in A of dist(a, B), by the grid index.
pub fn directed_hausdorff<S: Real>(a: &Cloud<S>, b: &Cloud<S>) -> S {
    let index = PointIndex::new(b);
    let pts: Vec<&[S]> = a.points().collect();
    pts.par_chunks(256)
        .map(|chunk| {
            let mut local = S::zero();
            for p in chunk {
                // Points closer than the running maximum cannot raise it.
                if local > S::zero() && index.any_within(p, local) {
                    continue;
                }
                let d = index.nearest(p);
                if d > local {
                    local = d;
                }
            }
            local
        })
        .reduce(S::zero, S::max)
}

pub fn hausdorff<S: Real>(a: &Cloud<S>, b: &Cloud<S>) -> Result<S> {
    if a.is_empty() || b.is_empty() {
        return domain("hausdorff of an empty cloud");
    }
    let (ab, ba) = rayon::join(|| directed_hausdorff(a, b), || directed_hausdorff(b, a));
    Ok(ab.max(ba))
}

/// The plain double loop, kept as the reference for the indexed path.
pub fn hausdorff_brute<S: Real>(a: &Cloud<S>, b: &Cloud<S>) -> S {
    let directed = |x: &Cloud<S>, y: &Cloud<S>| {
        x.points()
            .map(|p| y.points().map(|q| metric_slices(p, q)).fold(S::infinity(), S::min))
            .fold(S::zero(), S::max)
    };
    directed(a, b).max(directed(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::HPoint;

    fn cloud(pts: &[&[f64]]) -> Cloud<f64> {
        let p: Vec<HPoint<f64>> = pts.iter().map(|c| HPoint::from_f64(c).unwrap()).collect();
        Cloud::new("t", 0.01, &p).unwrap()
    }

    #[test]
    fn identity_and_simple_pair() {
        let a = cloud(&[&[0.0, 0.0]]);
        let b = cloud(&[&[0.0, 0.0], &[1.0, 0.0]]);
        assert_eq!(hausdorff(&a, &a).unwrap(), 0.0);
        assert_eq!(hausdorff(&a, &b).unwrap(), 0.5);
        assert_eq!(hausdorff_brute(&a, &b), 0.5);
    }

    #[test]
    fn cutoff_reports_nothing_nearer() {
        let b = cloud(&[&[0.9, 0.9]]);
        let idx = PointIndex::new(&b);
        assert_eq!(idx.nearest_within(&[0.0, 0.0], Some(0.1)), None);
        assert_eq!(idx.nearest(&[0.0, 0.0]), 0.45 + 0.225);
    }
}
