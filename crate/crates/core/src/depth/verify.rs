use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;

use super::lift::{LiftSampler, XinfOptions};
use super::model::DepthModel;
use super::seq::IndexSeq;
use crate::error::{domain, Result};
use crate::hilbert::{hausdorff, metric_slices, Cloud, PointIndex};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One line of a verification report.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub condition: String,
    pub status: Status,
    pub residual: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl Check {
    pub fn new(condition: impl Into<String>, residual: f64, tolerance: f64, note: impl Into<String>) -> Self {
        let status = if residual <= tolerance { Status::Pass } else { Status::Fail };
        Self { condition: condition.into(), status, residual, tolerance, note: note.into() }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// ω-tail of `L_n` over the block `[y(T+1), y(T)]` against `1/2 theta(X_{n-1})`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TailSample {
    pub block: usize,
    pub distance: f64,
    pub mesh: f64,
}

impl<S: Real> DepthModel<S> {
    /// Largest `|g_seq(e)|` over both endpoints `e` of every tabulated lap.
    pub fn glue_residual(&self) -> Result<f64> {
        let entries: Vec<_> = self.lap_table().iter().map(|(s, &iv)| (s.clone(), iv)).collect();
        entries
            .par_iter()
            .map(|(seq, (a, b))| Ok(self.g_eval(seq, *a)?.abs().as_f64().max(self.g_eval(seq, *b)?.abs().as_f64())))
            .try_reduce(|| 0.0, |x, y| Ok(x.max(y)))
    }

    /// Largest endpoint mismatch between `(h_i0 . f)(P^n_seq)` and `P^{n-1}` of
    /// the tail sequence.
    pub fn forward_residual(&self) -> Result<f64> {
        let entries: Vec<_> = self.lap_table().iter().map(|(s, &iv)| (s.clone(), iv)).collect();
        entries
            .par_iter()
            .filter_map(|(seq, iv)| seq.tail().map(|rest| (seq.head(), *iv, rest)))
            .map(|(i0, (a, b), rest)| {
                let (c, d) = self.build_pn(&rest)?;
                let r = (self.sigma(i0, a) - c).abs().max((self.sigma(i0, b) - d).abs());
                Ok(r.as_f64())
            })
            .try_reduce(|| 0.0, |x, y| Ok(x.max(y)))
    }

    /// Entries of level >= 1 sticking out of their parent by more than `tol`.
    pub fn nesting_violations(&self, tol: f64) -> usize {
        let tol = S::lit(tol);
        self.lap_table()
            .iter()
            .filter(|(seq, &(a, b))| {
                let Some(parent) = seq.parent() else { return false };
                let (c, d) = self.lap_table().get(&parent).expect("parents are tabulated");
                !(a >= c - tol && b <= d + tol && a < b)
            })
            .count()
    }

    /// Tabulated laps grouped by level and sorted by left end.
    fn laps_by_level(&self) -> Vec<Vec<(S, S, IndexSeq)>> {
        let mut levels = vec![Vec::new(); self.n_max() + 1];
        for (seq, &(a, b)) in self.lap_table().iter() {
            levels[seq.level()].push((a, b, seq.clone()));
        }
        for l in &mut levels {
            l.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        }
        levels
    }

    /// Compares the lazily evaluated coordinate `n+2` of `phi_{n+1}` with the
    /// tabulated `2^-(n+1) g_seq`. Draws `pairs` random `(seq, t)` with `t`
    /// in `P^n_seq`, then `pairs` uniform parameters above `y(i_max+1)` that
    /// are checked against whichever lap of each level contains them (zero
    /// when none does). Returns the largest disagreement.
    pub fn a10_residual(&self, pairs: usize, seed: u64) -> Result<f64> {
        let levels = self.laps_by_level();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weight = |n: usize| S::lit(0.5f64.powi(n as i32 + 1));
        let mut worst: f64 = 0.0;
        for _ in 0..pairs {
            let n = rng.gen_range(0..levels.len());
            let (a, b, seq) = &levels[n][rng.gen_range(0..levels[n].len())];
            let t = *a + (*b - *a) * S::lit(rng.gen::<f64>());
            let lazy = self.psi(n + 1, None, t)[n + 2];
            worst = worst.max((lazy - weight(n) * self.g_eval(seq, t)?).abs().as_f64());
        }
        let lo = self.table().y(self.i_max() + 1).as_f64();
        for _ in 0..pairs {
            let t = S::lit(rng.gen_range(lo..1.0));
            for (n, laps) in levels.iter().enumerate() {
                let lazy = self.psi(n + 1, None, t)[n + 2];
                let k = laps.partition_point(|e| e.0 <= t);
                let table = match k.checked_sub(1).map(|k| &laps[k]).filter(|e| t <= e.1) {
                    Some((_, _, seq)) => weight(n) * self.g_eval(seq, t)?,
                    None => S::zero(),
                };
                worst = worst.max((lazy - table).abs().as_f64());
            }
        }
        Ok(worst)
    }
}

impl DepthModel<f64> {
    /// `sup_t d(phi_n(t), phi_{n+1}(t))` over a sample of `[y(cap+1), 1]`
    /// with consecutive images of `phi_{n+1}` at most `tol` apart. Deeper
    /// laps repeat the same nested pattern.
    pub fn cauchy_sup(&self, n: usize, cap: usize, tol: f64) -> f64 {
        let lo = self.table().y(cap.min(self.reach()) + 1);
        let ts = LiftSampler::new(self).sample(n + 1, None, lo, 1.0, tol);
        ts.par_iter().map(|&t| metric_slices(&self.psi(n, None, t), &self.psi(n + 1, None, t))).reduce(|| 0.0, f64::max)
    }

    /// Samples `phi_n` over the block `[y(T+1), y(T)]` and measures its
    /// Hausdorff distance to `1/2 theta(prev)`, where `prev` samples `X_{n-1}`.
    pub fn omega_tail(&self, n: usize, block: usize, tol: f64, prev: &Cloud<f64>) -> Result<TailSample> {
        if n == 0 {
            return domain("the omega-tail comparison needs n >= 1");
        }
        if block + 1 > self.reach() {
            return domain(format!("block {block} needs extrema beyond {}", self.reach()));
        }
        let limit = prev.half_shift();
        let t = self.table();
        let ts = LiftSampler::new(self).sample(n, None, t.y(block + 1), t.y(block), tol);
        let data: Vec<f64> = ts.iter().flat_map(|&s| self.psi(n, None, s)).collect();
        let tail = Cloud::from_flat(format!("tail_{block}"), tol, n + 2, data)?;
        let distance = hausdorff(&tail, &limit)?;
        Ok(TailSample { block, distance, mesh: tol.max(limit.mesh()) })
    }

    /// Bound on `d(phi_n(sigma_inv(i, t)), 1/2 theta(phi_{n-1}(t)))`: only
    /// coordinates 0 and 1 differ.
    pub fn lap_lift_bound(&self, i: usize) -> f64 {
        let t = self.table();
        0.5 * t.z(i) + 0.25 * t.fy(i + 1).max((t.fz(i) - 0.5).abs())
    }

    /// Distances `d(phi_n(t_i), y)` for `y = 1/2 theta(phi_{n-1}(t))`, `t` the
    /// midpoint of `P^{n-1}_seq` and `t_i` its preimage in the lap `i`.
    pub fn a9_ladder(&self, seq: &IndexSeq, ladder: &[usize]) -> Result<Vec<(usize, f64)>> {
        let n = seq.level() + 1;
        let (a, b) = self.build_pn(seq)?;
        let t = 0.5 * (a + b);
        let y: Vec<f64> = std::iter::once(0.0).chain(self.psi(n - 1, None, t).iter().map(|c| c / 2.0)).collect();
        let mut out = Vec::new();
        for &i in ladder {
            if i < seq.head() || i > self.reach() {
                return domain(format!("lap {i} cannot precede {seq:?} within the table"));
            }
            let ti = self.sigma_inv(i, t);
            out.push((i, metric_slices(&self.psi(n, None, ti), &y)));
        }
        Ok(out)
    }

    fn arc_cloud(&self, m: usize, lo: f64, hi: f64, tol: f64, scale: bool) -> Result<Cloud<f64>> {
        let ts = LiftSampler::new(self).sample(m, None, lo, hi, tol);
        let data: Vec<f64> = ts.iter().flat_map(|&s| self.psi(m, None, s)).collect();
        let c = Cloud::from_flat("arc", tol, m + 2, data)?;
        Ok(if scale { c.half_shift() } else { c })
    }

    /// Hausdorff distances between members `Y` of a finite net of
    /// subcontinua of `omega(L_n)` and arcs `phi_n([a', b'])` inside the lap
    /// `i`, with the allowance each should meet.
    pub fn a6_net(&self, n: usize, i: usize, tol: f64) -> Result<Vec<(String, f64, f64)>> {
        if n == 0 {
            return domain("the subcontinuum net needs n >= 1");
        }
        let t = self.table();
        let bound = self.lap_lift_bound(i);
        let mut out = Vec::new();
        let g: Vec<f64> = (0..=512).flat_map(|k| [0.0, k as f64 / 1024.0]).collect();
        let g_copy = Cloud::from_flat("half_theta_G", 1.0 / 2048.0, 2, g)?;
        let arc = self.arc_cloud(n, t.z(i), t.y(i), tol, false)?;
        let allowance = 0.5 * t.y(i) + 0.25 * t.fy(i).max((t.fz(i) - 0.5).abs()) + tol + g_copy.mesh();
        out.push(("1/2 theta(G)".to_string(), hausdorff(&g_copy, &arc)?, allowance));
        let (p, q) = self.p0(2);
        for (a, b) in [(0.3, 0.9), (0.12, 0.45), (p, q)] {
            let y = self.arc_cloud(n - 1, a, b, 4.0 * tol, true)?;
            let arc = self.arc_cloud(n, self.sigma_inv(i, a), self.sigma_inv(i, b), tol, false)?;
            out.push((format!("1/2 theta(phi_{}([{a:.4}, {b:.4}]))", n - 1), hausdorff(&y, &arc)?, bound + 2.0 * tol));
        }
        Ok(out)
    }

    /// Number of first-coordinate quotient classes of a sampled `X_n` with
    /// diameter above `mesh`, and the base values of those classes.
    pub fn nondegenerate_fibers(cloud: &Cloud<f64>) -> Result<Vec<(f64, f64)>> {
        let Some(base) = cloud.meta().base.as_ref() else {
            return domain("cloud carries no quotient base values");
        };
        let mut groups: HashMap<u64, Vec<usize>> = HashMap::new();
        for (i, b) in base.iter().enumerate() {
            groups.entry(b.to_bits()).or_default().push(i);
        }
        let mut out = Vec::new();
        for (b, idx) in groups {
            if idx.len() < 2 {
                continue;
            }
            let diam = cloud.select(&idx)?.diameter();
            if diam > cloud.mesh() {
                out.push((f64::from_bits(b), diam));
            }
        }
        Ok(out)
    }

    /// Largest distance from a point of the witness path of `x` to `cloud`.
    pub fn witness_excursion(&self, index: &PointIndex<'_, f64>, x: &[f64], n: usize, tol: f64, cutoff: f64) -> Result<f64> {
        let path = self.arcwise_witness(x, n, tol, cutoff)?;
        let end = path.last().expect("paths are nonempty");
        if end[0] != 1.0 || end.iter().skip(1).any(|&c| c != 0.0) {
            return domain("witness path does not end at (1, 0, 0, ...)");
        }
        Ok(path.iter().map(|p| index.nearest_within(p, Some(cutoff)).unwrap_or_else(|| index.nearest(p))).fold(0.0, f64::max))
    }
}

/// Settings for [`condition_report`].
#[derive(Clone, Debug)]
pub struct ReportOptions {
    /// Highest level `n` checked.
    pub levels: usize,
    pub xinf: XinfOptions,
    /// Blocks `T` for the ω-tail comparison, coarse to fine.
    pub tail_ladder: Vec<usize>,
    /// Witness start points drawn from the sampled `X_n`.
    pub witnesses: usize,
    pub witness_level: usize,
    pub a10_samples: usize,
    /// Deepest lap scanned for the Cauchy bound; every lap repeats the
    /// nested pattern of the first.
    pub cauchy_cap: usize,
    pub seed: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            levels: 3,
            xinf: XinfOptions::default(),
            tail_ladder: vec![16, 32, 64],
            witnesses: 100,
            witness_level: 2,
            a10_samples: 10_000,
            cauchy_cap: 6,
            seed: 7,
        }
    }
}

/// Numeric checks of the construction. `exact` carries the lap table used for
/// glueing, forward images and the dual evaluation of coordinate `n+2`;
/// `model` (f64, deep extrema) produces the sampled clouds.
pub fn condition_report<D: Real>(exact: &DepthModel<D>, model: &DepthModel<f64>, opts: &ReportOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let top = *opts.tail_ladder.last().unwrap_or(&64);

    out.push(Check::new("glueing", exact.glue_residual()?, 1e-9, "g at both ends of every tabulated lap"));
    out.push(Check::new("forward_image", exact.forward_residual()?, 1e-9, ""));
    let bad = exact.nesting_violations(1e-12);
    out.push(Check::new("nesting", bad as f64, 0.0, format!("{} entries", exact.lap_table().len())));

    let mut a1: f64 = 0.0;
    let mut a5: f64 = 0.0;
    let mut a7: f64 = 0.0;
    let lo = model.table().y(opts.xinf.cap + 1);
    for n in 0..=opts.levels {
        let ts = LiftSampler::new(model).sample(n, None, lo, 1.0, opts.xinf.tol);
        for w in ts.windows(2) {
            if w[1] <= w[0] {
                a5 = f64::INFINITY;
            }
        }
        for &t in &ts {
            let p = model.psi(n, None, t);
            a5 = a5.max((p[0] - t).abs());
            let outside = p.iter().map(|&c| (-c).max(c - 1.0).max(0.0)).fold(0.0, f64::max);
            a1 = a1.max(outside).max(if p[0] > 0.0 { 0.0 } else { 1.0 });
            if n > 0 {
                let prev = model.psi(n - 1, None, t);
                a7 = a7.max(metric_slices(&p[..n + 1], &prev));
            }
        }
    }
    out.push(Check::new("A1", a1, 0.0, "samples of L_n lie in (0,1] x [0,1]^(n+1) x 0"));
    out.push(Check::new("A5", a5, 0.0, "first coordinate recovers the parameter, strictly increasing"));
    out.push(Check::new("A7", a7, 0.0, "dropping coordinate n+1 lands on phi_{n-1}"));

    let top_level = opts.levels.max(opts.witness_level);
    let clouds: Vec<Cloud<f64>> = (0..=top_level).map(|n| model.build_xinf(n, opts.xinf)).collect::<Result<_>>()?;
    for (n, x) in clouds.iter().enumerate().take(opts.levels + 1) {
        let fibers = DepthModel::nondegenerate_fibers(x)?;
        let only_zero = fibers.len() == 1 && fibers[0].0 == 0.0;
        out.push(Check::new(
            format!("A4[n={n}]"),
            if only_zero { 0.0 } else { (fibers.len() as f64 - 1.0).abs().max(1.0) },
            0.0,
            format!("nondegenerate classes at {:?}", fibers.iter().map(|f| f.0).collect::<Vec<_>>()),
        ));
    }

    for n in 1..=opts.levels {
        let ladder: Vec<TailSample> = opts.tail_ladder.iter().map(|&b| model.omega_tail(n, b, opts.xinf.tol, &clouds[n - 1])).collect::<Result<_>>()?;
        let last = ladder.last().expect("nonempty ladder");
        let note = ladder.iter().map(|s| format!("T={}: {:.5}", s.block, s.distance)).collect::<Vec<_>>().join(", ");
        out.push(Check::new(format!("A8[n={n}]"), last.distance, 5.0 * last.mesh, note));
    }

    for n in 1..=opts.levels {
        let seq = IndexSeq::new(vec![3; n])?;
        let ladder = model.a9_ladder(&seq, &opts.tail_ladder)?;
        let excess = ladder.iter().map(|&(i, d)| d - model.lap_lift_bound(i)).fold(f64::NEG_INFINITY, f64::max);
        let (i, d) = *ladder.last().unwrap();
        let note = ladder.iter().map(|(i, d)| format!("i0={i}: {d:.5}")).collect::<Vec<_>>().join(", ");
        let tol = model.lap_lift_bound(i);
        let residual = if excess <= 1e-12 { d } else { tol + excess };
        out.push(Check::new(format!("A9[n={n}]"), residual, tol, note));
    }

    for n in 1..=opts.levels {
        let net = model.a6_net(n, top, opts.xinf.tol)?;
        let worst = net.iter().map(|(_, d, allow)| d / allow).fold(0.0, f64::max);
        let note = net.iter().map(|(name, d, allow)| format!("{name}: {d:.5} of {allow:.5}")).collect::<Vec<_>>().join("; ");
        out.push(Check::new(format!("A6[n={n}]"), worst, 1.0, format!("distance / allowance; {note}")));
    }

    let a10 = exact.a10_residual(opts.a10_samples, opts.seed)?;
    out.push(Check::new("A10", a10, 1e-9, format!("{} (seq, t) pairs, table vs lazy walk", opts.a10_samples)));

    for n in 0..=opts.levels.max(4) {
        let sup = model.cauchy_sup(n, opts.cauchy_cap, opts.xinf.tol);
        out.push(Check::new(format!("cauchy[n={n}]"), sup, 0.5f64.powi(n as i32 + 2), ""));
    }

    let wn = opts.witness_level;
    let cloud = &clouds[wn];
    let index = PointIndex::new(cloud);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mesh = cloud.mesh();
    let starts: Vec<usize> = (0..opts.witnesses).map(|_| rng.gen_range(0..cloud.len())).collect();
    let worst = starts
        .par_iter()
        .map(|&k| model.witness_excursion(&index, cloud.point(k), wn, opts.xinf.tol, 2.0 * mesh))
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
    out.push(Check::new("witness", worst, 2.0 * mesh, format!("{} paths in X_{wn}", opts.witnesses)));
    Ok(out)
}
