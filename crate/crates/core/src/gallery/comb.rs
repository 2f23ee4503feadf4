use super::{seeds, trace, Curve};
use crate::error::Result;
use crate::hilbert::{Cloud, TrancheInfo};

pub const TAG_NAMES: [&str; 6] = ["L1", "L2", "G", "limit", "K", "A"];
const L1: u8 = 0;
const L2: u8 = 1;
const G: u8 = 2;
const LIMIT: u8 = 3;
const K: u8 = 4;
const A: u8 = 5;

/// Plane coordinates `(x, y)` with `x in [-1, 0]`, `y in [-3/2, 3/2]` are
/// stored as `u = x + 1`, `v = (y + 3/2)/3`; heights stay as they are.
pub fn to_unit(x: f64, y: f64) -> [f64; 2] {
    [x + 1.0, (y + 1.5) / 3.0]
}

/// The comb spaces `X_1 = G u L_1 u L_2` and `X = X_1 x {0} u K u A`, with
///
/// * `G = {-1} x [-1/2, 1] u [-1, 0] x {1} u {0} x [-1, 1]`,
/// * `L_{1,2} = {(x, sin(-pi/x)(1 + x)/2 +- 1) : x in [-1, 0)}`,
/// * `K = {(gamma(t), 1/(t+1))}` where `gamma` runs the cycles `gamma_N`,
///   `N = 1, 2, ...`, on consecutive unit intervals.
///
/// `L_i` is parametrized by `s >= 0` through `x = -1/(1+s)`, so
/// `sin(-pi/x) = sin(pi (1 + s))` and integer `s` lands on `y = +-1`.
#[derive(Clone, Copy, Debug)]
pub struct Comb {
    pub samples: usize,
    /// `L_i` is sampled for `s <= s_max`.
    pub s_max: f64,
    /// `K` is sampled for the cycles `N <= cycles`.
    pub cycles: usize,
}

impl Comb {
    pub fn new(samples: usize) -> Self {
        let cycles = ((samples as f64 / 400.0).sqrt() as usize).clamp(3, 40);
        Self { samples, s_max: 100.0, cycles }
    }

    /// `phi_1` (`sign = 1`) or `phi_2` (`sign = -1`) in plane coordinates.
    pub fn phi(sign: f64, s: f64) -> (f64, f64) {
        let x = -1.0 / (1.0 + s);
        let y = 0.5 * (-std::f64::consts::PI / x).sin() * (1.0 + x) + sign;
        (x, y)
    }

    /// `gamma_N` on `[0, 1]`, six equal pieces.
    pub fn gamma_n(n: usize, t: f64) -> (f64, f64) {
        let nf = n as f64;
        let u = (t.clamp(0.0, 1.0) * 6.0).min(6.0 - 1e-15);
        let i = u.floor() as usize;
        let r = u - i as f64;
        let cross = |from: f64, r: f64| {
            let (p, q) = (Self::phi(from, nf), Self::phi(-from, nf));
            (p.0 + (q.0 - p.0) * r, p.1 + (q.1 - p.1) * r)
        };
        match i {
            0 => Self::phi(1.0, nf * r),
            1 => cross(1.0, r),
            2 => Self::phi(-1.0, nf - nf * r),
            3 => Self::phi(-1.0, nf * r),
            4 => cross(-1.0, r),
            _ => Self::phi(1.0, nf - nf * r),
        }
    }

    /// `gamma(t) = gamma_N(t - N + 1)` for `t in [N - 1, N]`.
    pub fn gamma(t: f64) -> (f64, f64) {
        let n = (t.max(0.0).floor() as usize) + 1;
        Self::gamma_n(n, t - (n - 1) as f64)
    }

    pub fn k_point(t: f64) -> Vec<f64> {
        let (x, y) = Self::gamma(t);
        let [u, v] = to_unit(x, y);
        vec![u, v, 1.0 / (1.0 + t)]
    }

    fn l_curve<'a>(&self, sign: f64, tag: u8, base0: f64, lift: bool) -> Curve<'a> {
        let s_max = self.s_max;
        Curve::new(
            seeds(0.0, s_max, 8 * s_max as usize),
            tag,
            move |s| {
                let (x, y) = Self::phi(sign, s);
                let p = to_unit(x, y);
                if lift {
                    vec![p[0], p[1], 0.0]
                } else {
                    p.to_vec()
                }
            },
            move |s| base0 + s / (1.0 + s),
        )
    }

    fn segment<'a>(p: (f64, f64), q: (f64, f64), tag: u8, base: f64, lift: bool) -> Curve<'a> {
        let (a, b) = (to_unit(p.0, p.1), to_unit(q.0, q.1));
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        if lift {
            a.push(0.0);
            b.push(0.0);
        }
        Curve::segment(a, b, tag, base)
    }

    /// The pieces of `X_1`. Quotient coordinates: `L_1` runs to 1 and
    /// `L_2` to 3, where their limit segments sit; `G` edges get 4, 5, 6.
    fn x1_curves<'a>(&self, lift: bool) -> Vec<Curve<'a>> {
        vec![
            self.l_curve(1.0, L1, 0.0, lift),
            self.l_curve(-1.0, L2, 2.0, lift),
            Self::segment((-1.0, -0.5), (-1.0, 1.0), G, 4.0, lift),
            Self::segment((-1.0, 1.0), (0.0, 1.0), G, 5.0, lift),
            Self::segment((0.0, -1.0), (0.0, 1.0), G, 6.0, lift),
            Self::segment((0.0, 0.5), (0.0, 1.5), LIMIT, 1.0, lift),
            Self::segment((0.0, -1.5), (0.0, -0.5), LIMIT, 3.0, lift),
        ]
    }

    /// Distance from the cut tails of `L_1`, `L_2` to their limit segments.
    pub fn cutoff_error(&self) -> f64 {
        0.5 / (1.0 + self.s_max)
    }

    pub fn x1(&self) -> Result<Cloud<f64>> {
        let traced = trace(&self.x1_curves(false), self.samples, 0.0);
        let mesh = traced.chain.max(self.cutoff_error());
        let tranches = vec![
            TrancheInfo { base: 1.0, level: 1, label: "omega(L1)".into() },
            TrancheInfo { base: 3.0, level: 1, label: "omega(L2)".into() },
        ];
        traced.into_cloud("comb_x1", mesh, &TAG_NAMES, tranches)
    }

    /// Height left over when `K` is cut after `cycles` cycles.
    pub fn k_cutoff_error(&self) -> f64 {
        0.125 / (1.0 + self.cycles as f64)
    }

    /// `K` on `[t0, cycles]`, with 8 seeds per unit of `s` on every run.
    pub fn k_curve<'a>(&self, t0: f64) -> Curve<'a> {
        let mut ks = Vec::new();
        for n in 1..=self.cycles {
            let lo = (n - 1) as f64;
            ks.extend(seeds(lo, lo + 1.0, 6 * 8 * n.max(1)).into_iter().filter(|&t| t >= t0));
            ks.pop();
        }
        ks.push(self.cycles as f64);
        if ks[0] > t0 {
            ks.insert(0, t0);
        }
        Curve::new(ks, K, Self::k_point, |t| t / (1.0 + t))
    }

    /// `A`: from `phi_K(0) = (-1, 1, 1)` up to `y = 3/2`, down to height 0
    /// and back to `(-1, 1, 0)`, avoiding `K`.
    fn a_curves<'a>() -> Vec<Curve<'a>> {
        let p = |x: f64, y: f64, h: f64| {
            let [u, v] = to_unit(x, y);
            vec![u, v, h]
        };
        vec![
            Curve::segment(p(-1.0, 1.0, 1.0), p(-1.0, 1.5, 1.0), A, 0.0),
            Curve::segment(p(-1.0, 1.5, 1.0), p(-1.0, 1.5, 0.0), A, -0.5),
            Curve::segment(p(-1.0, 1.5, 0.0), p(-1.0, 1.0, 0.0), A, -1.0),
        ]
    }

    /// `X`; its tranche is the closure of `L_1 u L_2` with the right edge.
    pub fn x(&self) -> Result<Cloud<f64>> {
        let mut curves = self.x1_curves(true);
        curves.push(self.k_curve(0.0));
        curves.extend(Self::a_curves());
        let traced = trace(&curves, self.samples, 0.0);
        let mesh = traced.chain.max(self.cutoff_error()).max(self.k_cutoff_error());
        let tranche = TrancheInfo { base: 1.0, level: 1, label: "X1".into() };
        let mut cloud = traced.into_cloud("comb_x", mesh, &TAG_NAMES, vec![tranche])?;
        // K's limit set collapses to one quotient point
        let mut meta = cloud.meta().clone();
        if let (Some(base), Some(tags)) = (meta.base.as_mut(), meta.tags.as_ref()) {
            for (b, &t) in base.iter_mut().zip(tags) {
                if t == L1 || t == L2 || t == LIMIT || (t == G && *b == 6.0) {
                    *b = 1.0;
                }
            }
        }
        cloud = cloud.with_meta(meta)?;
        Ok(cloud)
    }

    /// Sample of `{0} x [y0, y1]` in plane coordinates.
    pub fn right_segment(y0: f64, y1: f64, n: usize, lift: bool) -> Result<Cloud<f64>> {
        let rows: Vec<f64> = seeds(y0, y1, n)
            .into_iter()
            .flat_map(|y| {
                let [u, v] = to_unit(0.0, y);
                if lift {
                    vec![u, v, 0.0]
                } else {
                    vec![u, v]
                }
            })
            .collect();
        let dim = if lift { 3 } else { 2 };
        let step = 0.25 * (y1 - y0).abs() / (3.0 * n.max(1) as f64);
        Cloud::from_flat("segment", step.max(1e-12), dim, rows)
    }

    /// `L_sign` for `s >= s0` together with its limit segment.
    pub fn l_tail(&self, sign: f64, s0: f64) -> Result<Cloud<f64>> {
        let s_max = self.s_max;
        let c = Curve::new(
            seeds(s0, s_max, 8 * (s_max - s0).ceil() as usize),
            0,
            move |s| {
                let (x, y) = Self::phi(sign, s);
                to_unit(x, y).to_vec()
            },
            |s| s,
        );
        let traced = trace(&[c], self.samples / 4, 0.0);
        let lim = Self::right_segment(sign - 0.5, sign + 0.5, 400, false)?;
        let mesh = traced.chain.max(self.cutoff_error());
        let tail = traced.into_cloud("tail", mesh, &TAG_NAMES, Vec::new())?;
        Cloud::union("tail closure", &[&tail, &lim])
    }

    /// `K` for `t >= t0` as a cloud.
    pub fn k_tail(&self, t0: f64) -> Result<Cloud<f64>> {
        let traced = trace(&[self.k_curve(t0)], self.samples, 0.0);
        let mesh = traced.chain.max(self.k_cutoff_error());
        traced.into_cloud("K tail", mesh, &TAG_NAMES, Vec::new())
    }
}

/// `(X_1, X)` with roughly `samples` points each.
pub fn comb_pair(samples: usize) -> Result<(Cloud<f64>, Cloud<f64>)> {
    let c = Comb::new(samples);
    Ok((c.x1()?, c.x()?))
}
