use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::curves::{warsaw_f, Map1D};
use crate::error::{domain, Result};
use crate::hilbert::{metric_slices, Cloud, CloudMeta};

/// Sampling controls for the orbit curves `t -> (t, f(t), ..., f^m(t))`.
#[derive(Clone, Copy, Debug)]
pub struct OrbitOptions {
    /// Target distance between consecutive samples.
    pub tol: f64,
    /// Parameters below `t_min` are left to the shifted copies.
    pub t_min: f64,
    /// Curve depth the shared parameters are refined for.
    pub depth: usize,
    /// Cap on the number of parameters.
    pub budget: usize,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        Self { tol: 1e-3, t_min: 2e-3, depth: 9, budget: 40_000 }
    }
}

/// `(t, f(t), ..., f^m(t))` for the Warsaw-type map.
pub fn orbit(t: f64, m: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(m + 1);
    let mut x = t;
    out.push(x);
    for _ in 0..m {
        x = warsaw_f(x).expect("orbits stay in (0, 1]");
        out.push(x);
    }
    out
}

/// Parameters shared by every orbit curve of a model, refined best-first
/// where consecutive points of the depth-`depth` curve are furthest apart.
#[derive(Clone, Debug)]
pub struct OrbitParams {
    ts: Vec<f64>,
    opts: OrbitOptions,
}

struct Gap {
    score: f64,
    a: f64,
    b: f64,
}

impl PartialEq for Gap {
    fn eq(&self, o: &Self) -> bool {
        self.score == o.score
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
        self.score.total_cmp(&o.score).then(o.a.total_cmp(&self.a))
    }
}

impl OrbitParams {
    pub fn new(opts: OrbitOptions) -> Result<Self> {
        if !(opts.tol > 0.0 && opts.t_min > 0.0 && opts.t_min < 1.0) {
            return domain("orbit sampling needs tol > 0 and t_min in (0, 1)");
        }
        let depth = opts.depth;
        // eight samples per monotone lap of f to start with
        let map = Map1D::<f64>::warsaw(opts.t_min);
        let mut seeds = vec![opts.t_min];
        for &(a, b) in map.monotone_laps() {
            for k in 1..=8 {
                seeds.push(a + (b - a) * k as f64 / 8.0);
            }
        }
        let score = |a: f64, b: f64| {
            let m = 0.5 * (a + b);
            let (pa, pm, pb) = (orbit(a, depth), orbit(m, depth), orbit(b, depth));
            // the midpoint guards against excursions between the ends
            metric_slices(&pa, &pb).max(metric_slices(&pa, &pm)).max(metric_slices(&pm, &pb))
        };
        let mut heap: BinaryHeap<Gap> =
            seeds.windows(2).map(|w| Gap { score: score(w[0], w[1]), a: w[0], b: w[1] }).collect();
        let mut ts = seeds;
        while ts.len() < opts.budget {
            let Some(top) = heap.peek() else { break };
            if top.score <= opts.tol {
                break;
            }
            let g = heap.pop().unwrap();
            let m = 0.5 * (g.a + g.b);
            if m <= g.a || m >= g.b {
                continue;
            }
            ts.push(m);
            heap.push(Gap { score: score(g.a, m), a: g.a, b: m });
            heap.push(Gap { score: score(m, g.b), a: m, b: g.b });
        }
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        Ok(Self { ts, opts })
    }

    pub fn params(&self) -> &[f64] {
        &self.ts
    }

    pub fn options(&self) -> OrbitOptions {
        self.opts
    }

    /// Largest distance between consecutive samples of the depth-`m` curve.
    pub fn chain_mesh(&self, m: usize) -> f64 {
        let pts: Vec<Vec<f64>> = self.ts.iter().map(|&t| orbit(t, m)).collect();
        pts.windows(2).map(|w| metric_slices(&w[0], &w[1])).fold(0.0, f64::max)
    }

    /// `theta^k` of the depth-`m` orbit curve, padded to `dim` coordinates.
    fn curve_rows(&self, k: usize, m: usize, dim: usize, out: &mut Vec<f64>) {
        for &t in &self.ts {
            let start = out.len();
            out.extend(std::iter::repeat_n(0.0, k));
            out.extend(orbit(t, m));
            out.resize(start + dim, 0.0);
        }
    }

    /// `union_{k <= copies} theta^k(curve of depth top - k)` plus the origin.
    fn union(&self, label: String, top: usize, copies: usize) -> Result<Cloud<f64>> {
        let dim = top + 1;
        let mut data = Vec::new();
        let mut tags = Vec::new();
        let mut base = Vec::new();
        for k in 0..=copies.min(top) {
            self.curve_rows(k, top - k, dim, &mut data);
            tags.extend(std::iter::repeat_n(if k == 0 { 0u8 } else { 1 }, self.ts.len()));
            base.extend(self.ts.iter().map(|&t| if k == 0 { t } else { 0.0 }));
        }
        data.extend(std::iter::repeat_n(0.0, dim));
        tags.push(2);
        base.push(0.0);
        // points cut off below t_min sit within t_min / 2 of the next copy
        let mesh = self.chain_mesh(top).max(self.opts.t_min / 2.0);
        Cloud::from_flat(label, mesh, dim, data)?.with_meta(CloudMeta {
            base: Some(base),
            tags: Some(tags),
            tag_names: ["orbit", "shifted", "origin"].iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        })
    }

    /// `A_n`: the depth-`n` orbit curve, `theta(A_{n-1})`, and the origin.
    pub fn build_a_n(&self, n: usize) -> Result<Cloud<f64>> {
        self.union(format!("A_{n}"), n, n)
    }

    /// `A` on its first `d + 2` coordinates: `theta^k` of the full orbit
    /// curve for `k <= d`, plus the origin.
    pub fn build_a(&self, d: usize) -> Result<Cloud<f64>> {
        self.union(format!("A^{d}"), d + 1, d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbit_starts_with_its_parameter() {
        let p = orbit(0.5, 2);
        assert_eq!(p[0], 0.5);
        assert_eq!(p[1], warsaw_f(0.5).unwrap());
        assert_eq!(orbit(1.0, 3), vec![1.0; 4]);
    }

    #[test]
    fn refinement_meets_the_tolerance_on_shallow_curves() {
        let p = OrbitParams::new(OrbitOptions { tol: 5e-3, t_min: 0.01, depth: 1, budget: 100_000 }).unwrap();
        assert!(p.chain_mesh(1) <= 5e-3);
        assert!(p.chain_mesh(0) <= p.chain_mesh(1));
    }
}
