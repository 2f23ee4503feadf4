use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::model::{DepthModel, Loc};
use crate::error::{domain, Error, Result};
use crate::hilbert::{metric_slices, Cloud, CloudMeta, TrancheInfo};
use crate::scalar::Real;

/// Upper bound for the depth map, used in diameter allowances.
const F_MAX: f64 = 0.81;

/// Bound on the diameter of coordinates 1.. of `Psi_m`.
fn tail_bound(m: usize) -> f64 {
    let mut e = F_MAX / 4.0;
    for _ in 0..m {
        e = F_MAX / 4.0 + e / 4.0;
    }
    e
}

type MemoKey = (usize, usize, u64);

/// Adaptive parameter sampler for the lifted arcs.
///
/// Every returned list of parameters has consecutive images within `tol`
/// of each other in diameter, using that coordinates 0 and 1 are monotone
/// between extrema and that a nested lap contributes a quarter of the
/// inner arc's diameter.
pub struct LiftSampler<'a, S> {
    model: &'a DepthModel<S>,
    seeds: usize,
    memo: Mutex<HashMap<MemoKey, Arc<Vec<S>>>>,
}

impl<'a, S: Real> LiftSampler<'a, S> {
    pub fn new(model: &'a DepthModel<S>) -> Self {
        Self { model, seeds: 16, memo: Mutex::new(HashMap::new()) }
    }

    /// Minimum samples per top-level monotone piece.
    pub fn with_seeds(mut self, seeds: usize) -> Self {
        self.seeds = seeds.max(2);
        self
    }

    fn f_cap(&self, cap: Option<usize>, s: S) -> S {
        match cap {
            Some(_) if s <= S::zero() => S::zero(),
            Some(c) => self.model.f_trunc(c, s),
            None => self.model.f(s),
        }
    }

    fn outer_gap(&self, cap: Option<usize>, a: S, b: S) -> f64 {
        0.5 * (b - a).abs().as_f64() + 0.25 * (self.f_cap(cap, b) - self.f_cap(cap, a)).abs().as_f64()
    }

    /// Pieces of [lo, hi] on which `f_cap` is monotone, each tagged with the
    /// lap index when it lies in some `P^0_j`, `j <= cap`.
    fn pieces(&self, cap: Option<usize>, lo: S, hi: S) -> Vec<(S, S, Option<usize>)> {
        let t = self.model.table();
        let c = cap.unwrap_or(self.model.reach()).min(self.model.reach());
        let mut knots: Vec<(S, Option<usize>)> = Vec::new();
        if cap.is_some() {
            knots.push((S::zero(), None));
        }
        knots.push((t.y(c + 1), None));
        for j in (1..=c).rev() {
            knots.push((t.y(j + 1), Some(j)));
            knots.push((t.z(j), None));
        }
        knots.push((S::one(), None));
        knots.dedup_by(|b, a| a.0 == b.0 && { a.1 = a.1.or(b.1); true });
        let mut out = Vec::new();
        for w in knots.windows(2) {
            let (a, b) = (w[0].0.max(lo), w[1].0.min(hi));
            if a < b {
                out.push((a, b, w[0].1));
            }
        }
        out
    }

    /// Sorted parameters in [lo, hi], ends included.
    pub fn sample(&self, m: usize, cap: Option<usize>, lo: S, hi: S, tol: f64) -> Vec<S> {
        self.sample_inner(m, cap, lo, hi, tol, true)
    }

    fn sample_inner(&self, m: usize, cap: Option<usize>, lo: S, hi: S, tol: f64, top: bool) -> Vec<S> {
        let mut out: Vec<S> = Vec::new();
        for (a, b, lap) in self.pieces(cap, lo, hi) {
            let nested = m >= 1 && lap.is_some() && 0.25 * tail_bound(m - 1) > tol / 2.0;
            let part = if nested {
                self.nested_piece(m, lap.unwrap(), a, b, tol)
            } else {
                let budget = if m >= 1 && lap.is_some() { tol - 0.25 * tail_bound(m - 1) } else { tol };
                self.monotone_piece(cap, a, b, budget, if top { self.seeds } else { 2 })
            };
            if out.last().is_some_and(|&l| l == part[0]) {
                out.extend_from_slice(&part[1..]);
            } else {
                out.extend(part);
            }
        }
        out
    }

    fn monotone_piece(&self, cap: Option<usize>, a: S, b: S, budget: f64, seeds: usize) -> Vec<S> {
        let mut out = vec![a];
        let n = S::from_usize(seeds - 1).unwrap();
        for k in 0..seeds - 1 {
            let x = a + (b - a) * S::from_usize(k).unwrap() / n;
            let y = a + (b - a) * S::from_usize(k + 1).unwrap() / n;
            self.bisect_into(cap, x, y, budget, &mut out);
        }
        out
    }

    fn bisect_into(&self, cap: Option<usize>, a: S, b: S, budget: f64, out: &mut Vec<S>) {
        let mut stack = vec![(a, b)];
        while let Some((x, y)) = stack.pop() {
            if self.outer_gap(cap, x, y) <= budget || y - x <= S::bisect_tol() {
                out.push(y);
            } else {
                let mid = (x + y) / S::lit(2.0);
                stack.push((mid, y));
                stack.push((x, mid));
            }
        }
    }

    fn nested_piece(&self, m: usize, j: usize, a: S, b: S, tol: f64) -> Vec<S> {
        let (pa, pb) = self.model.p0(j);
        let inner_tol = 2.0 * tol;
        let inner: Arc<Vec<S>> = if a == pa && b == pb {
            let key = (m - 1, j, inner_tol.to_bits());
            let hit = self.memo.lock().unwrap().get(&key).cloned();
            if let Some(v) = hit {
                v
            } else {
                let v = Arc::new(self.sample_inner(m - 1, Some(j), S::zero(), S::one(), inner_tol, false));
                self.memo.lock().unwrap().insert(key, v.clone());
                v
            }
        } else {
            let sa = self.model.sigma(j, a).max(S::zero()).min(S::one());
            let sb = self.model.sigma(j, b).max(S::zero()).min(S::one());
            Arc::new(self.sample_inner(m - 1, Some(j), sa, sb, inner_tol, false))
        };
        let to_t = |s: S, k: usize, len: usize| {
            if k == 0 {
                a
            } else if k + 1 == len {
                b
            } else {
                self.model.sigma_inv(j, s)
            }
        };
        let mut out = Vec::with_capacity(inner.len());
        let mut prev = (inner[0], a);
        out.push(a);
        for (k, &s) in inner.iter().enumerate().skip(1) {
            let t = to_t(s, k, inner.len());
            let mut stack = vec![(prev, (s, t))];
            while let Some(((s0, t0), (s1, t1))) = stack.pop() {
                if self.outer_gap(Some(j), t0, t1) <= tol / 2.0 || s1 - s0 <= S::bisect_tol() {
                    out.push(t1);
                } else {
                    let sm = (s0 + s1) / S::lit(2.0);
                    let tm = self.model.sigma_inv(j, sm);
                    stack.push(((sm, tm), (s1, t1)));
                    stack.push(((s0, t0), (sm, tm)));
                }
            }
            prev = (s, t);
        }
        out
    }
}

/// Sampling controls for the infinite-depth clouds.
#[derive(Clone, Copy, Debug)]
pub struct XinfOptions {
    /// Diameter bound between consecutive samples of a lifted arc.
    pub tol: f64,
    /// Deepest lap index sampled on the top-level arc.
    pub cap: usize,
    /// Spacing of samples along the base segment.
    pub g_step: f64,
}

impl Default for XinfOptions {
    fn default() -> Self {
        Self { tol: 4e-3, cap: 24, g_step: 4e-3 }
    }
}

/// Tags used by the infinite-depth clouds.
pub const TAG_NAMES: [&str; 3] = ["graph", "quasi-arc", "limit"];

impl DepthModel<f64> {
    /// Distance bound from `phi_n((0, y(cap+1)))` to the limit copy
    /// `1/2 theta(X_{n-1})`, excluding the limit sample's own mesh.
    pub fn truncation_bound(&self, cap: usize) -> Result<f64> {
        if cap + 1 > self.reach() {
            return Err(Error::Resolution(format!("cap {cap} needs extrema beyond {}", self.reach())));
        }
        let t = self.table();
        let fy = t.fy(cap + 2);
        let fz = t.fz(cap + 1);
        Ok(0.5 * t.y(cap + 1) + 0.25 * fy.max(fz - 0.5).max(0.0) + fy / 16.0)
    }

    /// Points `phi_n(t)` for sampled `t` in [lo, hi].
    pub fn phi_cloud_points(&self, n: usize, lo: f64, hi: f64, tol: f64) -> Vec<Vec<f64>> {
        let sampler = LiftSampler::new(self);
        sampler.sample(n, None, lo, hi, tol).into_iter().map(|t| self.psi(n, None, t)).collect()
    }

    fn g_points(step: f64) -> Vec<Vec<f64>> {
        let k = (1.0 / step).ceil() as usize;
        (0..=k).map(|i| vec![i as f64 / k as f64]).collect()
    }

    /// Sample of `X_n = G u closure(L_n)`, assembled as
    /// `G u phi_n([t_cut, 1]) u 1/2 theta(X_{n-1})` with `X_{-1} = G`.
    pub fn build_xinf(&self, n: usize, opts: XinfOptions) -> Result<Cloud<f64>> {
        if opts.tol <= 0.0 || opts.g_step <= 0.0 {
            return domain("sampling tolerances must be positive");
        }
        let trunc = self.truncation_bound(opts.cap)?;
        let t_cut = self.table().y(opts.cap + 1);
        let g_mesh = opts.g_step / 4.0;
        let g = Self::g_points(opts.g_step);
        let mut prev = Cloud::from_flat("G", g_mesh, 1, g.iter().flatten().copied().collect())?
            .with_meta(CloudMeta { tags: Some(vec![0; g.len()]), base: Some(g.iter().map(|p| p[0] / 2.0).collect()), ..Default::default() })?;
        let sampler = LiftSampler::new(self);
        for k in 0..=n {
            let ts = sampler.sample(k, None, t_cut, 1.0, opts.tol);
            let arc: Vec<f64> = ts.iter().flat_map(|&t| self.psi(k, None, t)).collect();
            let arc = Cloud::from_flat(format!("L_{k}"), opts.tol, k + 2, arc)?.with_meta(CloudMeta {
                tags: Some(vec![1; ts.len()]),
                base: Some(ts.iter().map(|t| 1.0 - t / 2.0).collect()),
                ..Default::default()
            })?;
            let limit = prev.half_shift();
            let limit_mesh = limit.mesh();
            let n_lim = limit.len();
            let limit = limit.with_meta(CloudMeta { tags: Some(vec![2; n_lim]), base: Some(vec![0.0; n_lim]), ..Default::default() })?;
            let gc = Cloud::from_flat("G", g_mesh, 1, g.iter().flatten().copied().collect())?.with_meta(CloudMeta {
                tags: Some(vec![0; g.len()]),
                base: Some(g.iter().map(|p| p[0] / 2.0).collect()),
                ..Default::default()
            })?;
            let mesh = g_mesh.max(opts.tol).max(trunc + limit_mesh);
            let mut meta_cloud = Cloud::union(format!("X_{k}"), &[&gc, &arc, &limit])?.with_mesh(mesh);
            meta_cloud = meta_cloud.with_tranches(vec![TrancheInfo { base: 0.0, level: k + 1, label: format!("omega(L_{k})") }]);
            let mut meta = meta_cloud.meta().clone();
            meta.tag_names = TAG_NAMES.iter().map(|s| s.to_string()).collect();
            prev = meta_cloud.with_meta(meta)?;
        }
        Ok(prev.with_label(format!("xinf_{n}")))
    }

    /// A path inside `X_n` from `x` to `(1, 0, 0, ...)`, following G, the
    /// lifted arc, and the scaled copies of G at the limit end.
    pub fn arcwise_witness(&self, x: &[f64], n: usize, tol: f64, locate_tol: f64) -> Result<Vec<Vec<f64>>> {
        let mut path = vec![x.to_vec()];
        self.witness_into(x, n as isize, tol, locate_tol, &mut path)?;
        Ok(path)
    }

    fn segment(from: f64, to: f64, tol: f64, lift: impl Fn(f64) -> Vec<f64>, out: &mut Vec<Vec<f64>>) {
        let k = (((to - from).abs() / tol).ceil() as usize).max(1);
        for i in 0..=k {
            out.push(lift(from + (to - from) * i as f64 / k as f64));
        }
    }

    fn witness_into(&self, x: &[f64], level: isize, tol: f64, locate_tol: f64, out: &mut Vec<Vec<f64>>) -> Result<()> {
        let x0 = x.first().copied().unwrap_or(0.0);
        let on_g = |t: f64| vec![t];
        if level < 0 {
            // inside the base segment only
            let d = metric_slices(x, &[x0]);
            if d > locate_tol {
                return domain(format!("point at distance {d} from the base segment"));
            }
            Self::segment(x0, 1.0, tol, on_g, out);
            return Ok(());
        }
        let n = level as usize;
        if x0 > 1e-12 {
            let dg = metric_slices(x, &[x0]);
            let located_arc = match self.locate(x0) {
                Loc::Below => None,
                _ => Some(self.psi(n, None, x0)),
            };
            let dl = located_arc.as_ref().map_or(f64::INFINITY, |p| metric_slices(x, p));
            if dg.min(dl) > locate_tol {
                return domain(format!("point not located in X_{n}: distances {dg}, {dl}"));
            }
            if dg <= dl {
                Self::segment(x0, 1.0, tol, on_g, out);
            } else {
                let sampler = LiftSampler::new(self).with_seeds(2);
                for t in sampler.sample(n, None, x0, 1.0, tol) {
                    out.push(self.psi(n, None, t));
                }
            }
            return Ok(());
        }
        if x.iter().all(|&c| c.abs() <= 1e-12) {
            Self::segment(0.0, 1.0, tol, on_g, out);
            return Ok(());
        }
        // x = 1/2 theta(y) for y in X_{n-1}
        let y: Vec<f64> = x.iter().skip(1).map(|&c| (2.0 * c).min(1.0)).collect();
        let mut inner = Vec::new();
        self.witness_into(&y, level - 1, 2.0 * tol, 4.0 * locate_tol, &mut inner)?;
        for p in inner {
            out.push(std::iter::once(0.0).chain(p.iter().map(|c| c / 2.0)).collect());
        }
        Self::segment(0.5, 0.0, tol, |v| vec![0.0, v], out);
        Self::segment(0.0, 1.0, tol, on_g, out);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_respect_the_diameter_bound_on_the_graph_level() {
        let m = DepthModel::<f64>::new(4, 1, 30).unwrap();
        let s = LiftSampler::new(&m);
        let ts = s.sample(0, None, m.table().y(21), 1.0, 0.01);
        for w in ts.windows(2) {
            let a = m.psi(0, None, w[0]);
            let b = m.psi(0, None, w[1]);
            assert!(metric_slices(&a, &b) <= 0.01 + 1e-12);
        }
    }

    #[test]
    fn tail_bound_is_finite() {
        assert!(tail_bound(10) < 0.28);
    }
}
