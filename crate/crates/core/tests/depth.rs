use proptest::prelude::*;
use std::sync::OnceLock;
use tranche_core::depth::*;
use tranche_core::hilbert::{product_metric, HPoint, PointIndex};
use twofloat::TwoFloat;

fn model() -> &'static DepthModel<f64> {
    static M: OnceLock<DepthModel<f64>> = OnceLock::new();
    M.get_or_init(|| DepthModel::new(8, 3, 80).unwrap())
}

fn exact() -> &'static DepthModel<TwoFloat> {
    static M: OnceLock<DepthModel<TwoFloat>> = OnceLock::new();
    M.get_or_init(|| DepthModel::new(8, 3, 8).unwrap())
}

fn seq(v: &[usize]) -> IndexSeq {
    IndexSeq::new(v.to_vec()).unwrap()
}

#[test]
fn index_sequences_must_not_increase() {
    assert!(IndexSeq::new(vec![5, 3, 3, 1]).is_ok());
    assert!(IndexSeq::new(vec![2, 3]).is_err());
    assert!(IndexSeq::new(vec![]).is_err());
    assert!(IndexSeq::new(vec![0]).is_err());
    let s = seq(&[5, 3, 2]);
    assert_eq!(s.level(), 2);
    assert_eq!(s.tail(), Some(seq(&[3, 2])));
    assert_eq!(s.parent(), Some(seq(&[5, 3])));
}

#[test]
fn affine_h_sends_the_lap_image_onto_the_unit_interval() {
    let m = model();
    for i in 1..=6 {
        let h = m.affine_h(i).unwrap();
        let (a, b) = m.p0(i);
        assert!(h.apply(m.f(a)).abs() < 1e-15);
        assert!((h.apply(m.f(b)) - 1.0).abs() < 1e-15);
        assert!((h.apply(0.5 * (m.f(a) + m.f(b))) - 0.5).abs() < 1e-15);
    }
    assert!(m.affine_h(0).is_err());
    assert!(m.affine_h(500).is_err());
}

#[test]
fn level_zero_laps_come_from_the_extrema_table() {
    let m = model();
    let t = m.table();
    assert_eq!(m.build_pn(&seq(&[3])).unwrap(), (t.y(4), t.z(3)));
}

#[test]
fn forward_image_of_a_pulled_back_lap() {
    let m = exact();
    for (i0, i1) in [(2, 1), (5, 3), (8, 8), (7, 2)] {
        let (a, b) = m.build_pn(&seq(&[i0, i1])).unwrap();
        let (c, d) = m.p0(i1);
        assert!((m.sigma(i0, a) - c).hi().abs() < 1e-9);
        assert!((m.sigma(i0, b) - d).hi().abs() < 1e-9);
    }
}

#[test]
fn laps_nest() {
    let m = model();
    let inner = m.build_pn(&seq(&[5, 3, 2])).unwrap();
    let mid = m.build_pn(&seq(&[5, 3])).unwrap();
    let outer = m.p0(5);
    assert!(outer.0 <= mid.0 && mid.0 < inner.0 && inner.1 < mid.1 && mid.1 <= outer.1);
    assert_eq!(exact().nesting_violations(1e-25), 0);
}

#[test]
fn g_vanishes_at_lap_ends() {
    assert!(exact().glue_residual().unwrap() < 1e-9);
    assert!(exact().forward_residual().unwrap() < 1e-9);
}

#[test]
fn g_matches_a_manual_composition() {
    let m = model();
    let (a, b) = m.p0(4);
    let t = a + 0.37 * (b - a);
    let h = m.affine_h(4).unwrap();
    let manual = m.f_trunc(4, h.apply(m.f(t)));
    assert!((m.g_eval(&seq(&[4]), t).unwrap() - manual).abs() < 1e-15);

    let (a, b) = m.build_pn(&seq(&[6, 2])).unwrap();
    let t = a + 0.61 * (b - a);
    let s = m.affine_h(6).unwrap().apply(m.f(t));
    let s = m.affine_h(2).unwrap().apply(m.f(s));
    let manual = m.f_trunc(2, s);
    assert!((m.g_eval(&seq(&[6, 2]), t).unwrap() - manual).abs() < 1e-12);
}

#[test]
fn g_outside_its_lap_is_a_domain_error() {
    let m = model();
    let (_, b) = m.p0(3);
    assert!(m.g_eval(&seq(&[3]), b + 0.01).is_err());
}

#[test]
fn g_is_continuous_on_a_grid() {
    let m = model();
    let s = seq(&[4, 3, 1]);
    let (a, b) = m.build_pn(&s).unwrap();
    let n = 4000;
    let vals: Vec<f64> = (0..=n).map(|k| m.g_eval(&s, a + (b - a) * k as f64 / n as f64).unwrap()).collect();
    let jump = vals.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
    assert!(jump < 0.05, "largest step {jump}");
}

#[test]
fn phi_zero_is_the_graph_and_extends_off_the_laps() {
    let m = model();
    assert_eq!(m.phi(0, 0.7).unwrap(), vec![0.7, m.f(0.7)]);
    let t = 0.5 * (m.table().z(2) + m.table().y(2));
    assert_eq!(m.locate(t), Loc::Gap(2));
    let p3 = m.phi(3, t).unwrap();
    assert_eq!(&p3[..2], &[t, m.f(t)]);
    assert!(p3[2..].iter().all(|&c| c == 0.0));
}

#[test]
fn appended_coordinate_is_the_scaled_composite() {
    let m = model();
    let s = seq(&[5, 2]);
    let (a, b) = m.build_pn(&s).unwrap();
    let t = 0.5 * (a + b);
    let p = m.phi(2, t).unwrap();
    assert!((p[3] - 0.25 * m.g_eval(&s, t).unwrap()).abs() < 1e-15);
    assert!((p[2] - 0.5 * m.g_eval(&seq(&[5]), t).unwrap()).abs() < 1e-15);
}

#[test]
fn appended_coordinate_vanishes_at_lap_ends() {
    let m = exact();
    for s in [seq(&[3]), seq(&[6, 4]), seq(&[8, 5, 5])] {
        let (a, b) = m.build_pn(&s).unwrap();
        let n = s.level() + 1;
        for e in [a, b] {
            assert!(m.psi(n, None, e)[n + 1].hi().abs() < 1e-9);
        }
    }
}

#[test]
fn consecutive_lifts_are_close() {
    let m = model();
    for n in 0..3 {
        let sup = m.cauchy_sup(n, 4, 4e-3);
        assert!(sup <= 0.5f64.powi(n as i32 + 2), "n = {n}: {sup}");
    }
}

#[test]
fn xinf_contains_its_marked_points() {
    let m = model();
    let opts = XinfOptions { cap: 12, ..Default::default() };
    for n in 0..3 {
        let x = m.build_xinf(n, opts).unwrap();
        assert!(x.contains_point(&[0.0], 0.0));
        assert!(x.contains_point(&[1.0], 0.0));
        assert!(x.mesh() >= opts.tol);
        assert_eq!(x.meta().tags.as_ref().unwrap().len(), x.len());
    }
}

#[test]
fn consecutive_xinf_clouds_converge() {
    let m = model();
    let opts = XinfOptions { cap: 12, ..Default::default() };
    let clouds: Vec<_> = (0..3).map(|n| m.build_xinf(n, opts).unwrap()).collect();
    for n in 0..2 {
        let d = tranche_core::hilbert::hausdorff(&clouds[n], &clouds[n + 1]).unwrap();
        let mesh = clouds[n].mesh().max(clouds[n + 1].mesh());
        assert!(d <= 0.5f64.powi(n as i32 + 2) + mesh, "n = {n}: {d}");
    }
}

#[test]
fn witness_from_the_far_end_is_trivial() {
    let m = model();
    let path = m.arcwise_witness(&[1.0], 2, 0.01, 0.01).unwrap();
    assert!(path.iter().all(|p| p[0] == 1.0 && p[1..].iter().all(|&c| c == 0.0)));
}

#[test]
fn witness_from_the_arc_follows_phi() {
    let m = model();
    let t = 0.3;
    let x = m.phi(2, t).unwrap();
    let path = m.arcwise_witness(&x, 2, 0.01, 1e-9).unwrap();
    assert_eq!(path[0], x);
    for p in &path[1..] {
        let q = m.phi(2, p[0]).unwrap();
        let d = product_metric(&HPoint::new(p.clone()).unwrap(), &HPoint::new(q).unwrap());
        assert!(d < 1e-15);
        assert!(p[0] >= t);
    }
    assert_eq!(path.last().unwrap()[0], 1.0);
}

#[test]
fn witness_from_the_limit_passes_through_shifted_copies_of_g() {
    let m = model();
    // a point of 1/2 theta(L_0)
    let y = m.phi(0, 0.45).unwrap();
    let x: Vec<f64> = std::iter::once(0.0).chain(y.iter().map(|c| c / 2.0)).collect();
    let path = m.arcwise_witness(&x, 1, 0.01, 1e-9).unwrap();
    assert!(path.iter().any(|p| p.len() == 2 && p[0] == 0.0 && p[1] == 0.0));
    assert!(path.iter().any(|p| p == &vec![0.0, 0.5]));
    let opts = XinfOptions { cap: 12, ..Default::default() };
    let cloud = m.build_xinf(1, opts).unwrap();
    let index = PointIndex::new(&cloud);
    let worst = path.iter().map(|p| index.nearest(p)).fold(0.0, f64::max);
    assert!(worst <= 2.0 * cloud.mesh(), "{worst}");
    assert!(m.arcwise_witness(&[0.0, 0.9, 0.9], 1, 0.01, 1e-6).is_err());
}

#[test]
fn only_the_limit_class_is_nondegenerate() {
    let m = model();
    let x = m.build_xinf(2, XinfOptions { cap: 12, ..Default::default() }).unwrap();
    let fibers = DepthModel::<f64>::nondegenerate_fibers(&x).unwrap();
    assert_eq!(fibers.len(), 1);
    assert_eq!(fibers[0].0, 0.0);
}

#[test]
fn report_serializes_as_json_rows() {
    let c = Check::new("A7", 0.0, 0.0, "");
    let v = serde_json::to_value(vec![c]).unwrap();
    assert_eq!(v[0]["condition"], "A7");
    assert_eq!(v[0]["status"], "pass");
    assert!(v[0].get("note").is_none());
    assert_eq!(Check::new("x", 2.0, 1.0, "").status, Status::Fail);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn composition_never_leaves_its_domains(raw in proptest::collection::vec(1usize..=8, 1..=4), u in 0.0f64..=1.0) {
        let mut idx = raw.clone();
        idx.sort_unstable_by(|a, b| b.cmp(a));
        let s = IndexSeq::new(idx).unwrap();
        let m = exact();
        let (a, b) = m.build_pn(&s).unwrap();
        let t = a + (b - a) * TwoFloat::from(u);
        let g = m.g_eval(&s, t).unwrap();
        prop_assert!(g.hi() >= -1e-12 && g.hi() <= 1.0 + 1e-12);
    }

    #[test]
    fn increasing_sequences_are_rejected(a in 1usize..20, d in 1usize..5) {
        prop_assert!(IndexSeq::new(vec![a, a + d]).is_err());
    }
}
