use num_rational::BigRational;
use proptest::prelude::*;
use std::sync::OnceLock;
use tranche_core::curves::{tent_relation_tol, tent_value, warsaw_f};
use tranche_core::hilbert::{directed_hausdorff, hausdorff, Cloud};
use tranche_core::mahavier::*;

fn params() -> &'static OrbitParams {
    static P: OnceLock<OrbitParams> = OnceLock::new();
    P.get_or_init(|| OrbitParams::new(OrbitOptions { budget: 8_000, ..Default::default() }).unwrap())
}

fn products() -> &'static ProductBuilder {
    static B: OnceLock<ProductBuilder> = OnceLock::new();
    B.get_or_init(|| ProductBuilder::new(ProductOptions::default()).unwrap())
}

fn xhat(d: usize) -> Cloud<f64> {
    let c = products().build(d).unwrap();
    let mesh = c.mesh() + 0.5f64.powi(d as i32 + 1);
    c.with_mesh(mesh)
}

#[test]
fn a0_and_a1_contain_their_marked_points() {
    let a0 = params().build_a_n(0).unwrap();
    assert!(a0.contains_point(&[1.0], 0.0) && a0.contains_point(&[0.0], 0.0));
    let a1 = params().build_a_n(1).unwrap();
    assert!(a1.contains_point(&[1.0, 1.0], 0.0));
    assert!(a1.contains_point(&[0.0, 1.0], 0.0));
    assert!(a1.contains_point(&[0.0, 0.0], 0.0));
}

#[test]
fn orbit_rows_follow_f() {
    let a = params().build_a_n(4).unwrap();
    let tags = a.meta().tags.clone().unwrap();
    for (p, &tag) in a.points().zip(&tags) {
        let start = p.iter().position(|&c| c != 0.0);
        let Some(s) = start else { continue };
        assert!(tag != 0 || s == 0);
        for w in p[s..].windows(2) {
            assert_eq!(w[1], warsaw_f(w[0]).unwrap());
        }
    }
}

#[test]
fn a2_and_a1_project_to_the_same_set() {
    let a1 = params().build_a_n(1).unwrap();
    let a2 = params().build_a_n(2).unwrap().truncate(2);
    assert!(hausdorff(&a1, &a2).unwrap() <= a1.mesh().max(a2.mesh()));
}

#[test]
fn theta_maps_a_into_itself() {
    let d = 5;
    let a = params().build_a(d).unwrap();
    let shifted = a.right_shift().truncate(d + 2);
    assert!(directed_hausdorff(&shifted, &a) <= 0.5f64.powi(d as i32 + 2) + 1e-12);
}

#[test]
fn fiber_of_a_over_zero_is_theta_of_a() {
    let d = 5;
    let a = params().build_a(d).unwrap();
    let f = fiber(&a, 0.0, 0.0).unwrap();
    let theta = params().build_a(d - 1).unwrap().right_shift();
    assert!(hausdorff(&f, &theta).unwrap() <= 1e-12);
}

#[test]
fn a_truncation_is_close_to_a_n() {
    for d in [2, 5, 8] {
        let gap = hausdorff(&params().build_a(d).unwrap(), &params().build_a_n(d).unwrap()).unwrap();
        assert!(gap <= 0.5f64.powi(d as i32 + 2) + 1e-3, "D = {d}: {gap}");
    }
}

#[test]
fn a_n_is_cauchy() {
    let a: Vec<_> = (0..=5).map(|n| params().build_a_n(n).unwrap()).collect();
    for n in 0..5 {
        let d = hausdorff(&a[n], &a[n + 1]).unwrap();
        assert!(d <= 0.5f64.powi(n as i32 + 2) + 1e-3, "n = {n}: {d}");
    }
}

#[test]
fn x0_is_the_unit_segment() {
    let x0 = products().build(0).unwrap();
    let dense = Cloud::from_flat("ref", 1e-3, 1, (0..=1000).map(|k| k as f64 / 1000.0).collect()).unwrap();
    assert!(hausdorff(&x0, &dense).unwrap() <= x0.mesh());
}

#[test]
fn samples_satisfy_the_tent_relation() {
    let x = products().build(5).unwrap();
    for p in x.points() {
        for w in p.windows(2) {
            assert!(tent_relation_tol(w[0], w[1], 1e-9).unwrap(), "{p:?}");
        }
    }
}

#[test]
fn vertical_segments_are_sampled() {
    let x1 = products().build(1).unwrap();
    for end in [0.0, 1.0] {
        let f = fiber(&x1, end, 0.0).unwrap().map_points("tail", |p| vec![p[1]]);
        let dense = Cloud::from_flat("ref", 1e-3, 1, (0..=1000).map(|k| k as f64 / 1000.0).collect()).unwrap();
        // the tail carries weight 1/2 inside X_1
        assert!(hausdorff(&f, &dense).unwrap() / 2.0 <= x1.mesh());
    }
}

#[test]
fn off_base_coordinates_are_determined_by_the_first() {
    let k = 4;
    let x = products().build(k).unwrap();
    let mut checked = 0;
    for p in x.points() {
        // float orbits cannot tell a base from a point next to one
        let mut orbit = vec![p[0]];
        for _ in 1..k {
            orbit.push(tent_value(*orbit.last().unwrap()));
        }
        if orbit.iter().any(|&y| !(1e-9..=1.0 - 1e-9).contains(&y)) {
            continue;
        }
        checked += 1;
        let mut y = p[0];
        for &c in &p[1..] {
            y = tent_value(y);
            assert!((c - y).abs() < 1e-6, "{p:?}");
        }
    }
    assert!(checked > 100);
}

#[test]
fn x_n_is_cauchy() {
    let x: Vec<_> = (0..=9).map(|n| products().build(n).unwrap()).collect();
    for n in 0..9 {
        let d = hausdorff(&x[n], &x[n + 1]).unwrap();
        let mesh = x[n].mesh().max(x[n + 1].mesh());
        assert!(d <= 0.5f64.powi(n as i32 + 2) + mesh, "n = {n}: {d}");
    }
}

#[test]
fn xhat_truncations_converge_and_contain_the_origin() {
    for d in [3, 6] {
        let (a, b) = (xhat(d), xhat(d + 1));
        let gap = hausdorff(&a, &b).unwrap();
        assert!(gap <= 0.5f64.powi(d as i32 + 1) + a.mesh().max(b.mesh()), "D = {d}: {gap}");
        assert!(a.contains_point(&vec![0.0; d + 1], 0.0));
    }
}

#[test]
fn fiber_over_zero_is_a_copy_of_xhat() {
    for d in [6, 8] {
        let top = xhat(d);
        let below = xhat(d - 1);
        let f = fiber(&top, 0.0, 0.0).unwrap().left_shift();
        let gap = hausdorff(&f, &below).unwrap();
        assert!(gap <= 2.0 * top.mesh().max(below.mesh()), "D = {d}: {gap}");
    }
}

#[test]
fn fiber_of_an_empty_slab_is_an_error() {
    let x = products().build(1).unwrap();
    assert!(fiber(&x, 0.5, -1.0).is_err());
    assert!(fiber(&x, 7.0, 0.01).is_err());
}

#[test]
fn fiber_off_the_bases_is_thin() {
    let b = ProductBuilder::new(ProductOptions { tol: 0.005, ..Default::default() }).unwrap();
    let x1 = b.build(1).unwrap();
    let (y, delta) = (0.3, 0.02);
    assert!(slab_hit(y - delta, y + delta, 1).is_none());
    let f = fiber(&x1, y, delta).unwrap();
    assert!(f.diameter() <= 4.0 * delta * 4.0, "{}", f.diameter());
}

#[test]
fn tranche_gaps_shrink_by_four_per_level() {
    for level in 1..=5 {
        let bases = tranche_bases(level).unwrap();
        assert_eq!(longest_gap(&bases), predicted_gap(level), "level {level}");
        assert!(bases.iter().all(|b| hitting_time(b, level - 1).is_some()));
    }
    assert!(tranche_bases(0).is_err());
}

#[test]
fn sampled_profile_finds_every_base() {
    let grid = 1e-3;
    for level in 1..=5 {
        let found = profile_bases(level, grid).unwrap();
        for b in tranche_bases(level).unwrap() {
            let y = rational_to_f64(&b);
            let i = found.partition_point(|&c| c < y);
            let near = [i.wrapping_sub(1), i].iter().filter_map(|&j| found.get(j)).any(|&c| (c - y).abs() <= grid);
            assert!(near, "level {level}: base {y} missed");
        }
    }
}

#[test]
fn degenerate_fraction_grows_with_the_grid() {
    for eps in [0.25, 0.0625] {
        let fr: Vec<f64> = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6].iter().map(|&g| degenerate_fraction(4, g, eps)).collect();
        assert!(fr.windows(2).all(|w| w[0] <= w[1]), "{fr:?}");
        assert!(fr[4] > 0.9, "{fr:?}");
    }
}

#[test]
fn bases_are_exact_preimages() {
    let b = tranche_bases(3).unwrap();
    let half = BigRational::new(1.into(), 2.into());
    assert!(b.contains(&half));
    assert_eq!(hitting_time(&half, 2), Some(1));
}

proptest! {
    #[test]
    fn tent_image_contains_the_images(lo in 0.001f64..0.998, w in 0.0f64..0.3, u in 0.0f64..=1.0) {
        let hi = (lo + w).min(0.999);
        let x = lo + (hi - lo) * u;
        let (a, b) = tent_image(lo, hi);
        let v = tent_value(x);
        prop_assert!(a - 1e-12 <= v && v <= b + 1e-12);
    }

    #[test]
    fn slab_diameter_bounds_sampled_fibers(y in 0.0f64..1.0, delta in 0.001f64..0.1) {
        let x = products().build(2).unwrap();
        if let Ok(f) = fiber(&x, y, delta) {
            prop_assert!(f.diameter() <= slab_diameter(y - delta, y + delta, 2) + 1e-9);
        }
    }
}
