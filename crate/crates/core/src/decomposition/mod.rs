//! Monotone-decomposition analysis of sampled continua: fiber profiles over
//! the quotient coordinate, tranche detection, degenerate-fiber density,
//! the approximation-property search and the Betti-number bound.

mod graph;

pub use graph::{betti1, TopoGraph, UnionFind};

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::hilbert::{metric_slices, Cloud};

/// What a fiber is taken over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Projection {
    /// One coordinate of the samples.
    Coordinate(usize),
    /// The builder-supplied quotient coordinate `meta.base`.
    Base,
}

impl Projection {
    pub fn values(&self, cloud: &Cloud<f64>) -> Result<Vec<f64>> {
        match *self {
            Projection::Coordinate(k) if k < cloud.dim() => Ok(cloud.points().map(|p| p[k]).collect()),
            Projection::Coordinate(k) => domain(format!("coordinate {k} outside dimension {}", cloud.dim())),
            Projection::Base => cloud
                .meta()
                .base
                .clone()
                .ok_or_else(|| Error::Domain(format!("{} carries no quotient coordinate", cloud.label()))),
        }
    }
}

/// The default ladder `2^-3, ..., 2^-8`.
pub fn eps_ladder() -> Vec<f64> {
    (3..=8).map(|k| 0.5f64.powi(k)).collect()
}

/// A maximal run of grid cells whose slab diameter exceeds the threshold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrancheRun {
    pub lo: f64,
    pub hi: f64,
    /// Lower end of the cell with the largest diameter.
    pub peak: f64,
    pub diameter: f64,
}

impl TrancheRun {
    pub fn contains(&self, b: f64, slack: f64) -> bool {
        self.lo - slack <= b && b <= self.hi + slack
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberProfile {
    pub grid: f64,
    pub threshold: f64,
    /// Lower ends of the nonempty cells.
    pub bases: Vec<f64>,
    pub diameters: Vec<f64>,
    pub tranches: Vec<TrancheRun>,
    /// `(eps, fraction of nonempty cells with diameter below eps)`.
    pub degenerate: Vec<(f64, f64)>,
}

impl FiberProfile {
    pub fn degenerate_fraction(&self, eps: f64) -> f64 {
        if self.diameters.is_empty() {
            return 0.0;
        }
        self.diameters.iter().filter(|&&d| d < eps).count() as f64 / self.diameters.len() as f64
    }
}

/// Diameter in the product metric. The metric is a weighted L1 sum, so the
/// diameter is the largest spread of `sum_k s_k w_k x_k` over sign vectors.
pub fn diameter(points: &[&[f64]]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let dim = points.iter().map(|p| p.len()).max().unwrap();
    if dim > 12 {
        return points
            .par_iter()
            .enumerate()
            .map(|(i, p)| points[i + 1..].iter().map(|q| metric_slices(p, q)).fold(0.0, f64::max))
            .reduce(|| 0.0, f64::max);
    }
    let signs = 1usize << dim.saturating_sub(1);
    (0..signs)
        .into_par_iter()
        .map(|mask| {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for p in points {
                let mut w = 0.5;
                let mut s = 0.0;
                for (k, &c) in p.iter().enumerate() {
                    let sign = if k > 0 && mask >> (k - 1) & 1 == 1 { -1.0 } else { 1.0 };
                    s += sign * w * c;
                    w *= 0.5;
                }
                lo = lo.min(s);
                hi = hi.max(s);
            }
            hi - lo
        })
        .reduce(|| 0.0, f64::max)
}

/// Slab diameters over a grid of width `grid` on the projection. Adjacent
/// cells above `10 (grid + mesh)` form one tranche run. A grid finer than
/// the mesh cannot separate fibers and is rejected.
pub fn fiber_profile(cloud: &Cloud<f64>, projection: Projection, grid: f64) -> Result<FiberProfile> {
    fiber_profile_with(cloud, projection, grid, &eps_ladder())
}

pub fn fiber_profile_with(
    cloud: &Cloud<f64>,
    projection: Projection,
    grid: f64,
    eps: &[f64],
) -> Result<FiberProfile> {
    if !(grid > 0.0) {
        return domain("grid step must be positive");
    }
    if grid < cloud.mesh() {
        return Err(Error::Resolution(format!("grid {grid} is finer than the mesh {}", cloud.mesh())));
    }
    let vals = projection.values(cloud)?;
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let mut cells: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, &v) in vals.iter().enumerate() {
        cells.entry(((v - lo) / grid).floor() as i64).or_default().push(i);
    }
    let keys: Vec<i64> = cells.keys().copied().collect();
    let diameters: Vec<f64> = cells
        .values()
        .map(|idx| {
            let pts: Vec<&[f64]> = idx.iter().map(|&i| cloud.point(i)).collect();
            diameter(&pts)
        })
        .collect();
    let bases: Vec<f64> = keys.iter().map(|&k| lo + k as f64 * grid).collect();
    let threshold = 10.0 * (grid + cloud.mesh());
    let mut tranches: Vec<TrancheRun> = Vec::new();
    let mut prev: Option<i64> = None;
    for (j, (&k, &d)) in keys.iter().zip(&diameters).enumerate() {
        if d <= threshold {
            prev = None;
            continue;
        }
        let b = bases[j];
        match (prev, tranches.last_mut()) {
            (Some(p), Some(run)) if k == p + 1 => {
                run.hi = b + grid;
                if d > run.diameter {
                    run.diameter = d;
                    run.peak = b;
                }
            }
            _ => tranches.push(TrancheRun { lo: b, hi: b + grid, peak: b, diameter: d }),
        }
        prev = Some(k);
    }
    // slabs next to a tranche are wide because the space accumulates
    // there; runs closer than their own width belong to one tranche
    let mut merged: Vec<TrancheRun> = Vec::new();
    for r in tranches {
        match merged.last_mut() {
            Some(m) if r.lo - m.hi < (m.hi - m.lo).max(r.hi - r.lo) => {
                m.hi = r.hi;
                if r.diameter > m.diameter {
                    m.diameter = r.diameter;
                    m.peak = r.peak;
                }
            }
            _ => merged.push(r),
        }
    }
    let tranches = merged;
    let mut profile = FiberProfile { grid, threshold, bases, diameters, tranches, degenerate: Vec::new() };
    profile.degenerate = eps.iter().map(|&e| (e, profile.degenerate_fraction(e))).collect();
    Ok(profile)
}

/// A finite family of base arcs: every `[nodes[i], nodes[j]]`, `i < j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcFamily {
    pub nodes: Vec<f64>,
}

impl ArcFamily {
    pub fn new(mut nodes: Vec<f64>) -> Self {
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        Self { nodes }
    }

    pub fn len(&self) -> usize {
        let n = self.nodes.len();
        n * n.saturating_sub(1) / 2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Nodes with one extra point between each pair, for stability checks.
    pub fn doubled(&self) -> Self {
        let mut out = Vec::with_capacity(2 * self.nodes.len());
        for w in self.nodes.windows(2) {
            out.push(w[0]);
            out.push(0.5 * (w[0] + w[1]));
        }
        out.extend(self.nodes.last());
        Self { nodes: out }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Approximation {
    #[serde(rename = "Y0")]
    pub y0: String,
    pub min: f64,
    pub witness: (f64, f64),
    pub eps: f64,
    pub success: bool,
    pub arcs: usize,
}

/// Exhaustive search over the arc family for the best
/// `d_H(phi^-1([a, b]), Y0)`, with `phi` the cloud's quotient coordinate.
///
/// Cells alternate between the nodes themselves and the open gaps between
/// them, so the preimage of `[n_i, n_j]` is the run of cells `2i ..= 2j`.
/// Both directed distances are then folded in one pass per arc.
pub fn approximation_test(cloud: &Cloud<f64>, y0: &Cloud<f64>, family: &ArcFamily, eps: f64) -> Result<Approximation> {
    if family.is_empty() {
        return domain("empty arc family");
    }
    let base = Projection::Base.values(cloud)?;
    let nodes = &family.nodes;
    let (first, last) = (nodes[0], *nodes.last().unwrap());
    let ncell = 2 * nodes.len() - 1;
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); ncell];
    for (i, &b) in base.iter().enumerate() {
        if b < first || b > last {
            continue;
        }
        let j = nodes.partition_point(|&n| n < b);
        let cell = if nodes.get(j) == Some(&b) { 2 * j } else { 2 * j - 1 };
        members[cell].push(i);
    }
    let ys: Vec<&[f64]> = y0.points().collect();
    let ny = ys.len();
    // near[c * ny + y]: distance from Y0 point y to cell c; far[c]: the
    // largest distance from a point of cell c to Y0
    let rows: Vec<(Vec<f64>, f64)> = members
        .par_iter()
        .map(|idx| {
            let mut near = vec![f64::INFINITY; ny];
            let mut far = 0.0f64;
            for &i in idx {
                let p = cloud.point(i);
                let mut best = f64::INFINITY;
                for (y, q) in ys.iter().enumerate() {
                    let d = metric_slices(p, q);
                    near[y] = near[y].min(d);
                    best = best.min(d);
                }
                far = far.max(best);
            }
            (near, far)
        })
        .collect();
    let best = (0..nodes.len() - 1)
        .into_par_iter()
        .map(|i| {
            let mut cover = vec![f64::INFINITY; ny];
            let mut far = 0.0f64;
            let mut best = (f64::INFINITY, i, i);
            for c in 2 * i..ncell {
                for (v, &d) in cover.iter_mut().zip(&rows[c].0) {
                    *v = v.min(d);
                }
                far = far.max(rows[c].1);
                if c % 2 == 0 && c > 2 * i {
                    let d = cover.iter().copied().fold(far, f64::max);
                    if d < best.0 {
                        best = (d, i, c / 2);
                    }
                }
            }
            best
        })
        .reduce(|| (f64::INFINITY, 0, 0), |a, b| if b.0 < a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) { b } else { a });
    let (min, i, j) = best;
    Ok(Approximation {
        y0: y0.label().to_string(),
        min,
        witness: (nodes[i], nodes[j]),
        eps,
        success: min < eps,
        arcs: family.len(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub tranches: usize,
    pub betti1: usize,
    pub holds: bool,
}

/// Declared tranche count against `b_1` of the quotient graph.
pub fn tranche_bound_check(cloud: &Cloud<f64>, quotient: &TopoGraph) -> Result<BoundReport> {
    let b = betti1(quotient)?;
    let t = cloud.meta().tranches.len();
    Ok(BoundReport { tranches: t, betti1: b, holds: t <= b })
}

/// Detected runs matched against the builder's declared tranche bases:
/// every declared base lies in a run and every run holds a declared base.
pub fn tranches_match(cloud: &Cloud<f64>, profile: &FiberProfile) -> bool {
    let declared: Vec<f64> = cloud.meta().tranches.iter().map(|t| t.base).collect();
    let g = profile.grid;
    declared.iter().all(|&b| profile.tranches.iter().any(|r| r.contains(b, g)))
        && profile.tranches.iter().all(|r| declared.iter().any(|&b| r.contains(b, g)))
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    pub space: String,
    pub tranches: Vec<TrancheRun>,
    #[serde(rename = "degenerateFraction")]
    pub degenerate_fraction: BTreeMap<String, f64>,
    pub approximation: Vec<Approximation>,
}

impl DecompositionReport {
    pub fn new(space: &str, profile: &FiberProfile, approximation: Vec<Approximation>) -> Self {
        Self {
            space: space.to_string(),
            tranches: profile.tranches.clone(),
            degenerate_fraction: profile.degenerate.iter().map(|&(e, f)| (format!("{e}"), f)).collect(),
            approximation,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_vector_diameter_matches_pairs() {
        let pts: Vec<Vec<f64>> = (0..40).map(|i| vec![(i as f64 * 0.37) % 1.0, (i as f64 * 0.61) % 1.0, 0.3]).collect();
        let refs: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
        let brute = (0..40)
            .flat_map(|i| (0..40).map(move |j| (i, j)))
            .map(|(i, j)| metric_slices(&pts[i], &pts[j]))
            .fold(0.0, f64::max);
        assert!((diameter(&refs) - brute).abs() < 1e-12);
    }
}
