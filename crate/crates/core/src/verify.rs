//! Verification suites shared by the command line and the acceptance tests.
//! Every suite returns report rows; a suite passes when all rows pass.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use twofloat::TwoFloat;

pub use crate::depth::{Check, Status};
use crate::decomposition::{
    approximation_test, fiber_profile, tranche_bound_check, tranches_match, ArcFamily, Projection, TopoGraph,
};
use crate::depth::{condition_report, DepthModel, ReportOptions};
use crate::dynamics::{entropy_lower_bound, exactness_witness, realize_itinerary, bowen_distance, EntropyOptions};
use crate::error::{Error, Result};
use crate::gallery::{comb_pair, Spiral, Star, StarGood, StarRoute, Warsaw};
use crate::hilbert::{hausdorff, hausdorff_brute, product_metric, Cloud, HPoint};
use crate::mahavier::{
    build_xhat, fiber, longest_gap, predicted_gap, profile_bases, rational_to_f64, tranche_bases, OrbitOptions,
    OrbitParams, ProductOptions,
};
use crate::symbolic::{corpus, order_and_depth, quotient, reduce, replay, validate, Condition};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Metric,
    Mahavier,
    Depth,
    Gallery,
    Decomposition,
    Symbolic,
    Dynamics,
}

impl Suite {
    pub const ALL: [Suite; 7] =
        [Suite::Metric, Suite::Mahavier, Suite::Depth, Suite::Gallery, Suite::Decomposition, Suite::Symbolic, Suite::Dynamics];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Metric => "metric",
            Suite::Mahavier => "mahavier",
            Suite::Depth => "depth",
            Suite::Gallery => "gallery",
            Suite::Decomposition => "decomposition",
            Suite::Symbolic => "symbolic",
            Suite::Dynamics => "dynamics",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Base sample count for the gallery spaces; failure floors are
    /// re-measured at twice this.
    pub samples: usize,
    /// Random cloud pairs for the Hausdorff oracle.
    pub pairs: usize,
    pub max_points: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { seed: 7, samples: 20_000, pairs: 200, max_points: 2_000 }
    }
}

pub fn run(suite: Suite, opts: &VerifyOptions) -> Result<Vec<Check>> {
    match suite {
        Suite::Metric => {
            let mut out = hausdorff_oracle(opts);
            out.extend(metric_identities(opts)?);
            Ok(out)
        }
        Suite::Mahavier => {
            let mut out = a_n_convergence()?;
            out.extend(tranche_gap_law()?);
            out.extend(fiber_self_similarity()?);
            Ok(out)
        }
        Suite::Depth => depth_conditions(opts),
        Suite::Gallery => approximation_dichotomy(opts),
        Suite::Decomposition => decomposition_bounds(opts),
        Suite::Symbolic => symbolic_suite(),
        Suite::Dynamics => dynamics_suite(),
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(Check::passed)
}

fn random_cloud(rng: &mut ChaCha8Rng, n: usize, dim: usize, clustered: bool) -> Cloud<f64> {
    let centre: Vec<f64> = (0..dim).map(|_| rng.gen()).collect();
    let mut data = Vec::with_capacity(n * dim);
    for _ in 0..n {
        for &c in &centre {
            data.push(if clustered { (c + 0.1 * (rng.gen::<f64>() - 0.5)).clamp(0.0, 1.0) } else { rng.gen() });
        }
    }
    Cloud::from_flat("random", 0.01, dim, data).expect("coordinates lie in [0, 1]")
}

/// Fast-path Hausdorff distance against the brute-force double loop,
/// compared bit for bit.
pub fn hausdorff_oracle(opts: &VerifyOptions) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let pairs: Vec<(Cloud<f64>, Cloud<f64>)> = (0..opts.pairs)
        .map(|k| {
            let (na, nb) = (rng.gen_range(1..=opts.max_points), rng.gen_range(1..=opts.max_points));
            let (da, db) = (rng.gen_range(1..=10), rng.gen_range(1..=10));
            let a = random_cloud(&mut rng, na, da, k % 3 == 0);
            let b = random_cloud(&mut rng, nb, db, k % 4 == 1);
            (a, if k % 5 == 2 { b.half_shift() } else { b })
        })
        .collect();
    let mismatches = pairs
        .par_iter()
        .filter(|(a, b)| hausdorff(a, b).map(f64::to_bits).ok() != Some(hausdorff_brute(a, b).to_bits()))
        .count();
    vec![Check::new("hausdorff_oracle", mismatches as f64, 0.0, format!("{} pairs up to {} points", opts.pairs, opts.max_points))]
}

/// `d(theta x, theta y) = d(x, y) / 2` and `sigma theta = id` on random points.
pub fn metric_identities(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
    let (mut halving, mut inverse) = (0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let d = rng.gen_range(1..=16);
        let x: HPoint<f64> = HPoint::new((0..d).map(|_| rng.gen()).collect())?;
        let y: HPoint<f64> = HPoint::new((0..d).map(|_| rng.gen()).collect())?;
        halving = halving.max((product_metric(&x.right_shift(), &y.right_shift()) - product_metric(&x, &y) / 2.0).abs());
        inverse = inverse.max(product_metric(&x.right_shift().left_shift(), &x));
    }
    Ok(vec![
        Check::new("theta_halves_distances", halving, 1e-12, "10000 pairs"),
        Check::new("sigma_theta_identity", inverse, 1e-12, "10000 points"),
    ])
}

/// `d_H(A_n, A_{n+1}) <= 2^-(n+2)` up to a 1e-3 sampling slack, `n <= 8`.
pub fn a_n_convergence() -> Result<Vec<Check>> {
    let p = OrbitParams::new(OrbitOptions::default())?;
    let a: Vec<Cloud<f64>> = (0..=9).map(|n| p.build_a_n(n)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for n in 0..9 {
        let d = hausdorff(&a[n], &a[n + 1])?;
        let note = format!("chain mesh {:.4}", a[n + 1].mesh());
        out.push(Check::new(format!("A_convergence[n={n}]"), d, 0.5f64.powi(n as i32 + 2) + 1e-3, note));
    }
    Ok(out)
}

/// Exact longest tranche-free gaps at levels 1 to 5, and the sampled
/// profile finding every base within one grid step at grid 1e-3.
pub fn tranche_gap_law() -> Result<Vec<Check>> {
    let grid = 1e-3;
    let mut out = Vec::new();
    for level in 1..=5 {
        let bases = tranche_bases(level)?;
        let gap = longest_gap(&bases);
        let exact = gap == predicted_gap(level);
        out.push(Check::new(format!("gap_law[level={level}]"), if exact { 0.0 } else { 1.0 }, 0.0, format!("longest gap {gap}")));
        let found = profile_bases(level, grid)?;
        let worst = bases
            .iter()
            .map(|b| {
                let y = rational_to_f64(b);
                let i = found.partition_point(|&c| c < y);
                [i.wrapping_sub(1), i].iter().filter_map(|&j| found.get(j)).map(|c| (c - y).abs()).fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max);
        out.push(Check::new(format!("profile_bases[level={level}]"), worst, grid, format!("{} bases", bases.len())));
    }
    Ok(out)
}

fn xhat(d: usize) -> Result<Cloud<f64>> {
    let c = build_xhat(d, ProductOptions::default())?;
    let mesh = c.mesh() + 0.5f64.powi(d as i32 + 1);
    Ok(c.with_mesh(mesh))
}

/// `d_H(sigma(fiber over 0), X^_{D-1}) <= 2 mesh` at `D` in {6, 8, 10}.
pub fn fiber_self_similarity() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for d in [6, 8, 10] {
        let (top, below) = (xhat(d)?, xhat(d - 1)?);
        let f = fiber(&top, 0.0, 0.0)?.left_shift();
        let mesh = top.mesh().max(below.mesh());
        out.push(Check::new(format!("fiber_self_similarity[D={d}]"), hausdorff(&f, &below)?, 2.0 * mesh, ""));
    }
    Ok(out)
}

/// The numeric conditions of the depth construction.
pub fn depth_conditions(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let exact = DepthModel::<TwoFloat>::new(8, 3, 8)?;
    let model = DepthModel::<f64>::new(8, 3, 80)?;
    condition_report(&exact, &model, &ReportOptions { seed: opts.seed, ..Default::default() })
}

fn drift(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.max(b)
}

/// A failing family: `min >= 3 mesh` at both resolutions, drift below 10%.
fn failure_rows(name: &str, mins: [(f64, f64); 2]) -> Vec<Check> {
    let [(m0, mesh0), (m1, mesh1)] = mins;
    let note = format!("floors {m0:.4}, {m1:.4}");
    vec![
        Check::new(format!("{name}_fails"), 3.0 * mesh0.max(mesh1), m0.min(m1), note),
        Check::new(format!("{name}_floor_drift"), drift(m0, m1), 0.1, ""),
    ]
}

/// Warsaw circle and star4_good approximate their limit pieces; star4_route
/// and circle_spiral do not, at a stable floor.
pub fn approximation_dichotomy(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let n = opts.samples;
    let mut out = Vec::new();

    let w = Warsaw::new(n);
    let c = w.cloud()?;
    let (lo, hi) = w.tail_window(3);
    let base = c.meta().base.as_ref().expect("warsaw carries bases");
    let fam = ArcFamily::new(base.iter().copied().filter(|&b| b >= lo && b <= hi).collect());
    let y0 = w.limit_piece(0.1, 0.3, c.mesh() / 2.0)?;
    let r = approximation_test(&c, &y0, &fam, 3.0 * c.mesh())?;
    out.push(Check::new("warsaw_approximable", r.min, 3.0 * c.mesh(), "Y0 = {0} x [0.1, 0.3]"));

    let g = StarGood::new(5 * n);
    let c = g.cloud()?;
    let worst = StarGood::net(8)
        .par_iter()
        .map(|el| {
            let (a, b) = g.witness(el);
            let w = (b - a).abs() / 64.0;
            let fam = ArcFamily::new(vec![a - w, a, a + w, b - w, b, b + w]);
            approximation_test(&c, &el.cloud(0.005)?, &fam, 3.0 * c.mesh()).map(|r| r.min)
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
    out.push(Check::new("star4_good_approximable", worst, 3.0 * c.mesh(), "worst over the level-8 net"));

    let y0 = Star::edges(&[0, 2], 0.005)?;
    let mut mins = [(0.0, 0.0); 2];
    for (k, m) in [n, 2 * n].into_iter().enumerate() {
        let r = StarRoute::new(m, [0, 1, 2, 3])?;
        let c = r.cloud()?;
        mins[k] = (approximation_test(&c, &y0, &ArcFamily::new(r.arc_nodes(1)), 3.0 * c.mesh())?.min, c.mesh());
    }
    out.extend(failure_rows("star4_route", mins));

    let q = Spiral::circle_arc(-PI / 4.0, PI / 4.0, 200)?;
    for (k, m) in [n, 2 * n].into_iter().enumerate() {
        let s = Spiral::new(m);
        let c = s.cloud()?;
        let fam = ArcFamily::new(s.arc_nodes(8, s.t_cut / 2.0));
        mins[k] = (approximation_test(&c, &q, &fam, 3.0 * c.mesh())?.min, c.mesh());
    }
    out.extend(failure_rows("circle_spiral", mins));
    Ok(out)
}

/// Tranche detection and the Betti bound on the gallery, and the
/// degenerate-fiber density of the Warsaw circle.
pub fn decomposition_bounds(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let c = Warsaw::new(opts.samples).cloud()?;
    let p = fiber_profile(&c, Projection::Base, 3.0 * c.mesh())?;
    let ok = p.tranches.len() == 1 && tranches_match(&c, &p);
    out.push(Check::new("warsaw_tranches", if ok { 0.0 } else { 1.0 }, 0.0, format!("{} runs", p.tranches.len())));

    let (x1, x) = comb_pair(opts.samples)?;
    let graphs = [
        ("warsaw", &c, TopoGraph::circle()),
        ("comb_X", &x, TopoGraph::new(2, vec![(0, 0), (0, 0), (0, 1), (1, 0)])?),
        ("comb_X1", &x1, TopoGraph::new(4, vec![(0, 1), (1, 2), (3, 2), (1, 2), (0, 3)])?),
    ];
    for (name, cloud, q) in graphs {
        let r = tranche_bound_check(cloud, &q)?;
        out.push(Check::new(format!("betti_bound[{name}]"), r.tranches as f64, r.betti1 as f64, "tranches against b1"));
    }

    let dense = Warsaw::new(10 * opts.samples).cloud()?;
    let p = fiber_profile(&dense, Projection::Base, 1e-3)?;
    let least = p.degenerate.iter().map(|&(_, f)| f).fold(1.0, f64::min);
    let note = p.degenerate.iter().map(|(e, f)| format!("{e}: {f:.3}")).collect::<Vec<_>>().join(", ");
    out.push(Check::new("warsaw_degenerate_density", 1.0 - least, 0.1, note));
    Ok(out)
}

/// Corpus verdicts, hand counts, removal replay and the Betti bound at
/// every removal stage.
pub fn symbolic_suite() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for e in corpus() {
        let mut got: Vec<Condition> = validate(&e.spec).iter().map(|v| v.condition).collect();
        got.sort();
        got.dedup();
        let mut want = e.violations.clone();
        want.sort();
        let ok = got == want;
        out.push(Check::new(format!("validate[{}]", e.name), if ok { 0.0 } else { 1.0 }, 0.0, format!("{got:?}")));
        let Some((depth, b1, tranches)) = e.counts else { continue };
        let q = quotient(&e.spec)?;
        let d = order_and_depth(&e.spec)?.depth;
        let ok = (d, q.betti1, q.tranches) == (depth, b1, tranches);
        out.push(Check::new(
            format!("counts[{}]", e.name),
            if ok { 0.0 } else { 1.0 },
            0.0,
            format!("depth {d}, b1 {}, tranches {}", q.betti1, q.tranches),
        ));
        let stages = reduce(&e.spec)?;
        let excess = stages.iter().map(|s| s.quotient.tranches as f64 - s.quotient.betti1 as f64).fold(f64::NEG_INFINITY, f64::max);
        out.push(Check::new(format!("stage_bound[{}]", e.name), excess.max(0.0), 0.0, format!("{} stages", stages.len())));
        let rebuilt = replay(&stages)?;
        let bad = validate(&rebuilt).len() + usize::from(order_and_depth(&rebuilt)?.depth != depth);
        out.push(Check::new(format!("replay[{}]", e.name), bad as f64, 0.0, ""));
    }
    Ok(out)
}

/// Entropy bound from the two-symbol itineraries, their separation, and
/// the exactness witness for the fiber over 0.
pub fn dynamics_suite() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let b = entropy_lower_bound(8, 0.4, EntropyOptions::default())?;
    let floor = 2f64.ln() - 0.05;
    out.push(Check::new("entropy[n=8,eps=0.4]", floor - b.bound, 0.0, format!("bound {:.4}, {} separated", b.bound, b.separated)));

    let dim = EntropyOptions::default().dim;
    let words: Vec<HPoint<f64>> = (0..1u32 << 8)
        .map(|w| realize_itinerary(&(0..8).map(|i| ((w >> i) & 1) as u8).collect::<Vec<_>>(), dim))
        .collect::<Result<_>>()?;
    let mut sep = f64::INFINITY;
    for i in 0..words.len() {
        for j in 0..i {
            sep = sep.min(bowen_distance(&words[i], &words[j], 8));
        }
    }
    let want = 0.5 - 0.5f64.powi(dim as i32 + 1);
    out.push(Check::new("itinerary_separation", want - sep, 0.0, format!("min Bowen distance {sep}")));

    let x = build_xhat(8, ProductOptions::default())?;
    let w = exactness_witness(&fiber(&x, 0.0, 1e-9)?, &x, 4)?;
    let miss = if w.n == Some(1) { 0.0 } else { 1.0 };
    out.push(Check::new("exactness[D=8,y=0]", miss, 0.0, format!("n = {:?}, distances {:?}", w.n, w.distances)));
    Ok(out)
}
