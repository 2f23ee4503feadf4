//! Sampled models of the named planar examples: the Warsaw circle, the
//! 4-star quasi-arcs, the circle spiral and the comb spaces.

mod comb;
mod spiral;
mod star;
mod warsaw;

pub use comb::{comb_pair, to_unit, Comb};
pub use spiral::{circle_spiral, Spiral};
pub use star::{star4_good, star4_route, NetElement, Star, StarGood, StarRoute};
pub use warsaw::{warsaw_circle, Warsaw};

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{domain, Result};
use crate::hilbert::{metric_slices, Cloud, CloudMeta, TrancheInfo};

/// A parametrized piece of a space: samples start at `seeds` and are
/// refined where consecutive images are furthest apart.
pub struct Curve<'a> {
    pub seeds: Vec<f64>,
    pub eval: Box<dyn Fn(f64) -> Vec<f64> + Sync + 'a>,
    pub base: Box<dyn Fn(f64) -> f64 + Sync + 'a>,
    pub tag: u8,
}

impl<'a> Curve<'a> {
    pub fn new(
        seeds: Vec<f64>,
        tag: u8,
        eval: impl Fn(f64) -> Vec<f64> + Sync + 'a,
        base: impl Fn(f64) -> f64 + Sync + 'a,
    ) -> Self {
        Self { seeds, eval: Box::new(eval), base: Box::new(base), tag }
    }

    /// A straight segment, with a constant base value.
    pub fn segment(p: Vec<f64>, q: Vec<f64>, tag: u8, base: f64) -> Self {
        Self::new(
            vec![0.0, 1.0],
            tag,
            move |s| p.iter().zip(&q).map(|(a, b)| a + (b - a) * s).collect(),
            move |_| base,
        )
    }
}

/// Evenly spaced seeds on `[a, b]`.
pub fn seeds(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect()
}

struct Gap {
    score: f64,
    curve: usize,
    a: f64,
    b: f64,
}

impl PartialEq for Gap {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Gap {}
impl PartialOrd for Gap {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Gap {
    fn cmp(&self, o: &Self) -> Ordering {
        self.score
            .total_cmp(&o.score)
            .then(o.curve.cmp(&self.curve))
            .then(o.a.total_cmp(&self.a))
    }
}

/// Samples of several curves, in curve order and increasing parameter.
#[derive(Clone, Debug, Default)]
pub struct Traced {
    pub rows: Vec<Vec<f64>>,
    pub params: Vec<f64>,
    pub bases: Vec<f64>,
    pub tags: Vec<u8>,
    /// Largest remaining distance between consecutive samples (or a
    /// midpoint) of any curve.
    pub chain: f64,
}

/// Best-first refinement of all curves together until `budget` samples
/// are placed or every gap is below `tol`.
pub fn trace(curves: &[Curve], budget: usize, tol: f64) -> Traced {
    let score = |c: &Curve, a: f64, b: f64| {
        let (pa, pm, pb) = ((c.eval)(a), (c.eval)(0.5 * (a + b)), (c.eval)(b));
        metric_slices(&pa, &pb).max(metric_slices(&pa, &pm)).max(metric_slices(&pm, &pb))
    };
    let mut params: Vec<Vec<f64>> = curves.iter().map(|c| c.seeds.clone()).collect();
    let mut heap = BinaryHeap::new();
    for (i, c) in curves.iter().enumerate() {
        for w in c.seeds.windows(2) {
            heap.push(Gap { score: score(c, w[0], w[1]), curve: i, a: w[0], b: w[1] });
        }
    }
    let mut count: usize = params.iter().map(Vec::len).sum();
    while count < budget {
        let Some(top) = heap.peek() else { break };
        if top.score <= tol {
            break;
        }
        let g = heap.pop().unwrap();
        let m = 0.5 * (g.a + g.b);
        if m <= g.a || m >= g.b {
            continue;
        }
        let c = &curves[g.curve];
        params[g.curve].push(m);
        count += 1;
        heap.push(Gap { score: score(c, g.a, m), curve: g.curve, a: g.a, b: m });
        heap.push(Gap { score: score(c, m, g.b), curve: g.curve, a: m, b: g.b });
    }
    let chain = heap.peek().map_or(0.0, |g| g.score);
    let mut out = Traced { chain, ..Default::default() };
    for (c, ps) in curves.iter().zip(params.iter_mut()) {
        ps.sort_by(f64::total_cmp);
        ps.dedup();
        for &t in ps.iter() {
            out.rows.push((c.eval)(t));
            out.params.push(t);
            out.bases.push((c.base)(t));
            out.tags.push(c.tag);
        }
    }
    out
}

impl Traced {
    /// Packs the samples into a cloud with per-point bases and tags.
    pub fn into_cloud(
        self,
        label: &str,
        mesh: f64,
        tag_names: &[&str],
        tranches: Vec<TrancheInfo>,
    ) -> Result<Cloud<f64>> {
        if self.rows.is_empty() {
            return domain(format!("{label}: nothing sampled"));
        }
        let dim = self.rows.iter().map(Vec::len).max().unwrap();
        let mut data = Vec::with_capacity(self.rows.len() * dim);
        for r in &self.rows {
            data.extend_from_slice(r);
            data.resize(data.len() + dim - r.len(), 0.0);
        }
        Cloud::from_flat(label, mesh.max(f64::MIN_POSITIVE), dim, data)?.with_meta(CloudMeta {
            tranches,
            base: Some(self.bases),
            tags: Some(self.tags),
            tag_names: tag_names.iter().map(|s| s.to_string()).collect(),
        })
    }
}

/// A sampled straight segment as its own cloud, for reference sets `Y0`.
pub fn segment_cloud(label: &str, p: &[f64], q: &[f64], step: f64) -> Result<Cloud<f64>> {
    let len = metric_slices(p, q);
    let n = ((len / step).ceil() as usize).max(1);
    let mut data = Vec::with_capacity((n + 1) * p.len());
    for k in 0..=n {
        let s = k as f64 / n as f64;
        data.extend(p.iter().zip(q).map(|(a, b)| a + (b - a) * s));
    }
    Cloud::from_flat(label, (len / n as f64).max(step * 1e-3), p.len(), data)
}

/// Sample of a parametrized set on `[a, b]` with `n` even steps.
pub fn curve_cloud(label: &str, a: f64, b: f64, n: usize, f: impl Fn(f64) -> Vec<f64>) -> Result<Cloud<f64>> {
    let rows: Vec<Vec<f64>> = seeds(a, b, n).into_iter().map(f).collect();
    let dim = rows[0].len();
    let mesh = rows.windows(2).map(|w| metric_slices(&w[0], &w[1])).fold(0.0, f64::max);
    Cloud::from_flat(label, mesh.max(1e-12), dim, rows.concat())
}
