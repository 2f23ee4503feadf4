use std::f64::consts::PI;
use std::sync::OnceLock;

use tranche_core::decomposition::*;
use tranche_core::gallery::*;
use tranche_core::hilbert::{directed_hausdorff, hausdorff, Cloud};

fn warsaw() -> &'static (Warsaw, Cloud<f64>) {
    static W: OnceLock<(Warsaw, Cloud<f64>)> = OnceLock::new();
    W.get_or_init(|| {
        let w = Warsaw::new(20_000);
        (w, w.cloud().unwrap())
    })
}

fn drift(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.max(b)
}

fn tail(cloud: &Cloud<f64>, from: f64) -> Cloud<f64> {
    let base = cloud.meta().base.clone().unwrap();
    let tags = cloud.meta().tags.clone().unwrap();
    cloud.filter(|i, _| tags[i] == 0 && base[i] >= from).unwrap()
}

#[test]
fn warsaw_contains_its_limit_segment() {
    let (_, c) = warsaw();
    for k in 0..=50 {
        let v = 0.5 * k as f64 / 50.0;
        assert!(c.contains_point(&[0.0, v], c.mesh()), "v = {v}");
    }
    assert!(c.contains_point(&[1.0, 0.0], 0.0));
}

#[test]
fn warsaw_has_one_tranche() {
    let (_, c) = warsaw();
    let p = fiber_profile(c, Projection::Base, 3.0 * c.mesh()).unwrap();
    assert_eq!(p.tranches.len(), 1, "{:?}", p.tranches);
    assert!(tranches_match(c, &p));
    let r = tranche_bound_check(c, &TopoGraph::circle()).unwrap();
    assert!(r.holds && r.tranches == 1 && r.betti1 == 1);
}

#[test]
fn warsaw_limit_pieces_are_approximable() {
    let (w, c) = warsaw();
    let (lo, hi) = w.tail_window(3);
    let nodes: Vec<f64> = c.meta().base.as_ref().unwrap().iter().copied().filter(|&b| b >= lo && b <= hi).collect();
    let fam = ArcFamily::new(nodes);
    for (a, b) in [(0.1, 0.3), (0.0, 0.5), (0.2, 0.21)] {
        let y0 = w.limit_piece(a, b, c.mesh() / 2.0).unwrap();
        let r = approximation_test(c, &y0, &fam, 3.0 * c.mesh()).unwrap();
        assert!(r.success, "[{a}, {b}]: {} vs mesh {}", r.min, c.mesh());
    }
}

const GRIDS: [f64; 5] = [0.1, 0.03, 0.01, 0.003, 0.001];

/// Degenerate fractions over the grids that resolve `eps` (grid at most
/// `eps` and at least the mesh), coarse to fine.
fn fractions(c: &Cloud<f64>, eps: f64) -> Vec<f64> {
    GRIDS
        .iter()
        .filter(|&&g| g <= eps && g >= c.mesh())
        .map(|&g| fiber_profile(c, Projection::Base, g).unwrap().degenerate_fraction(eps))
        .collect()
}

#[test]
fn warsaw_degenerate_fibers_fill_up_under_refinement() {
    let w = Warsaw::new(200_000).cloud().unwrap();
    for eps in eps_ladder() {
        let fr = fractions(&w, eps);
        assert!(fr.windows(2).all(|x| x[0] <= x[1]), "eps {eps}: {fr:?}");
        assert!(*fr.last().unwrap() > 0.9, "eps {eps}: {fr:?}");
    }
}

#[test]
fn degenerate_fractions_grow_under_refinement() {
    let (x1, x) = comb_pair(200_000).unwrap();
    let spaces = [
        StarRoute::new(200_000, [0, 1, 2, 3]).unwrap().cloud().unwrap(),
        StarGood::new(200_000).cloud().unwrap(),
        Spiral::new(200_000).cloud().unwrap(),
        x1,
        x,
    ];
    for c in &spaces {
        for eps in eps_ladder() {
            let fr = fractions(c, eps);
            assert!(fr.windows(2).all(|x| x[0] <= x[1]), "{} eps {eps}: {fr:?}", c.label());
        }
    }
}

fn star_nodes(r: &StarRoute) -> ArcFamily {
    ArcFamily::new(r.arc_nodes(1))
}

#[test]
fn star_route_tail_is_close_to_the_star() {
    let r = StarRoute::new(20_000, [0, 1, 2, 3]).unwrap();
    let c = r.cloud().unwrap();
    let k = r.oscillations as f64 - 2.0;
    let t = tail(&c, k / (1.0 + k));
    let star = Star::edges(&[0, 1, 2, 3], 0.002).unwrap();
    let d = hausdorff(&t, &star).unwrap();
    assert!(d <= 3.0 * c.mesh(), "{d} vs mesh {}", c.mesh());
}

#[test]
fn star_route_misses_opposite_edges_at_every_resolution() {
    let y0 = Star::edges(&[0, 2], 0.005).unwrap();
    let mut mins = Vec::new();
    for n in [20_000, 40_000] {
        let r = StarRoute::new(n, [0, 1, 2, 3]).unwrap();
        let c = r.cloud().unwrap();
        let fam = star_nodes(&r);
        let a = approximation_test(&c, &y0, &fam, 3.0 * c.mesh()).unwrap();
        let b = approximation_test(&c, &y0, &fam.doubled(), 3.0 * c.mesh()).unwrap();
        assert!(!a.success && a.min >= 0.2, "{}", a.min);
        assert!(drift(a.min, b.min) < 0.1, "{} vs {}", a.min, b.min);
        mins.push(a.min);
    }
    assert!(drift(mins[0], mins[1]) < 0.1, "{mins:?}");
}

#[test]
fn star_route_single_edges_are_approximable() {
    let r = StarRoute::new(20_000, [0, 1, 2, 3]).unwrap();
    let c = r.cloud().unwrap();
    for e in 0..4 {
        let y0 = Star::edges(&[e], 0.005).unwrap();
        let a = approximation_test(&c, &y0, &star_nodes(&r), 3.0 * c.mesh()).unwrap();
        assert!(a.success, "E{}: {} vs mesh {}", e + 1, a.min, c.mesh());
    }
}

#[test]
fn adjacent_edges_in_the_route_are_approximable() {
    let r = StarRoute::new(20_000, [0, 2, 1, 3]).unwrap();
    let c = r.cloud().unwrap();
    let y0 = Star::edges(&[0, 2], 0.005).unwrap();
    let a = approximation_test(&c, &y0, &star_nodes(&r), 3.0 * c.mesh()).unwrap();
    assert!(a.success, "{}", a.min);
}

#[test]
fn star_route_needs_a_permutation() {
    assert!(StarRoute::new(1000, [0, 1, 1, 3]).is_err());
    assert!(star4_route(1000, [0, 1, 2, 4]).is_err());
}

#[test]
fn star_good_approximates_the_whole_net() {
    let g = StarGood::new(100_000);
    let c = g.cloud().unwrap();
    let net = StarGood::net(8);
    assert_eq!(net.len(), 4 * 36 + 9usize.pow(4));
    let worst = net
        .iter()
        .map(|el| {
            let (a, b) = g.witness(el);
            let y0 = el.cloud(0.005).unwrap();
            let w = (b - a).abs() / 64.0;
            let fam = ArcFamily::new(vec![a - w, a, a + w, b - w, b, b + w]);
            approximation_test(&c, &y0, &fam, 3.0 * c.mesh()).unwrap().min
        })
        .fold(0.0, f64::max);
    assert!(worst < 3.0 * c.mesh(), "{worst} vs mesh {}", c.mesh());
}

#[test]
fn star_good_tail_fills_the_star() {
    let g = StarGood::new(100_000);
    let c = g.cloud().unwrap();
    let k = g.levels as f64 - 1.0;
    let t = tail(&c, k / (1.0 + k));
    let star = Star::edges(&[0, 1, 2, 3], 0.002).unwrap();
    let d = hausdorff(&t, &star).unwrap();
    assert!(d <= 2.0 * c.mesh(), "{d} vs mesh {}", c.mesh());
    // the quasi-arc starts at height 1, away from the star
    assert!(directed_hausdorff(&Cloud::from_flat("p", 1e-9, 3, g.eval(0.0)).unwrap(), &star) >= 0.125);
}

#[test]
fn spiral_tail_approaches_the_circle() {
    let s = Spiral::new(20_000);
    let c = s.cloud().unwrap();
    let t0 = s.t_cut / 2.0;
    let t = tail(&c, t0 / (1.0 + t0));
    let circle = Spiral::circle_arc(0.0, 2.0 * PI, 2000).unwrap();
    let d = hausdorff(&t, &circle).unwrap();
    assert!(d <= 1.0 / (1.0 + t0) + c.mesh(), "{d}");
}

#[test]
fn spiral_cannot_follow_the_quarter_across_its_gap() {
    let q = Spiral::circle_arc(-PI / 4.0, PI / 4.0, 200).unwrap();
    let mut mins = Vec::new();
    for n in [20_000, 40_000] {
        let s = Spiral::new(n);
        let c = s.cloud().unwrap();
        let fam = ArcFamily::new(s.arc_nodes(8, s.t_cut / 2.0));
        let a = approximation_test(&c, &q, &fam, 3.0 * c.mesh()).unwrap();
        let b = approximation_test(&c, &q, &fam.doubled(), 3.0 * c.mesh()).unwrap();
        assert!(!a.success, "{}", a.min);
        assert!(drift(a.min, b.min) < 0.1, "{} vs {}", a.min, b.min);
        mins.push(a.min);
    }
    assert!(drift(mins[0], mins[1]) < 0.1, "{mins:?}");
}

#[test]
fn spiral_approximates_the_circle_and_arcs_off_the_gap() {
    let s = Spiral::new(20_000);
    let c = s.cloud().unwrap();
    let fam = ArcFamily::new(s.arc_nodes(128, s.t_cut * 0.9));
    for (a0, a1) in [(0.0, 2.0 * PI), (PI / 2.0, PI), (PI / 4.0, 7.0 * PI / 4.0)] {
        let y0 = Spiral::circle_arc(a0, a1, 800).unwrap();
        let r = approximation_test(&c, &y0, &fam, 3.0 * c.mesh()).unwrap();
        assert!(r.success, "[{a0}, {a1}]: {} vs mesh {}", r.min, c.mesh());
    }
}

#[test]
fn comb_quasi_arcs_follow_the_formulas() {
    let (x1, x) = comb_pair(20_000).unwrap();
    let p = to_unit(-1.0, 1.0);
    assert!(x1.contains_point(&p, 0.0));
    assert_eq!(Comb::phi(1.0, 0.0), (-1.0, 1.0));
    // integer parameters land on y = +-1
    for s in [1.0, 2.0, 7.0] {
        assert!((Comb::phi(-1.0, s).1 + 1.0).abs() < 1e-12);
    }
    assert_eq!(x.dim(), 3);
    assert_eq!(x.meta().tranches.len(), 1);
    assert_eq!(x1.meta().tranches.len(), 2);
}

#[test]
fn gamma_cycles_are_continuous() {
    for n in 1..5 {
        let (a, b) = (Comb::gamma_n(n, 0.0), Comb::gamma_n(n, 1.0 - 1e-12));
        assert!((a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9);
        for i in 1..6 {
            let t = i as f64 / 6.0;
            let (l, r) = (Comb::gamma_n(n, t - 1e-12), Comb::gamma_n(n, t));
            assert!((l.0 - r.0).abs() < 1e-9 && (l.1 - r.1).abs() < 1e-9, "N = {n}, piece {i}");
        }
    }
}

fn one_limit_gap(samples: usize) -> f64 {
    let cb = Comb::new(samples);
    let l1 = cb.l_tail(1.0, 50.0).unwrap();
    let l2 = cb.l_tail(-1.0, 50.0).unwrap();
    let right = Comb::right_segment(-1.0, 1.0, 400, false).unwrap();
    let all = Cloud::union("limit component", &[&l1, &l2, &right]).unwrap();
    hausdorff(&l1, &all).unwrap()
}

#[test]
fn one_limit_set_misses_the_limit_component() {
    let (a, b) = (one_limit_gap(20_000), one_limit_gap(40_000));
    assert!(a > 0.1, "{a}");
    assert!(drift(a, b) < 0.1, "{a} vs {b}");
}

#[test]
fn k_tail_approaches_x1() {
    let cb = Comb::new(60_000);
    let x1 = cb.x1().unwrap().map_points("X1 x 0", |p| vec![p[0], p[1], 0.0]);
    let t_cut = cb.cycles as f64 - 3.0;
    let kt = cb.k_tail(t_cut).unwrap();
    let mesh = kt.mesh().max(x1.mesh());
    assert!(hausdorff(&kt, &x1).unwrap() <= 1.0 / (1.0 + t_cut) + mesh);
    // off X_1, K only crosses at x = -1/(N+1), half that far from the right edge
    assert!(directed_hausdorff(&kt, &x1) <= 0.625 / (1.0 + t_cut) + mesh);
}
