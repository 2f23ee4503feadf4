use super::{seeds, segment_cloud, trace, Curve};
use crate::error::{domain, Result};
use crate::hilbert::{Cloud, TrancheInfo};

pub const TAG_NAMES: [&str; 2] = ["quasi-arc", "limit"];

/// The 4-star in the plane `h = 0` of `(x, y, h)`: centre `(1/2, 1/2)` and
/// tips at the corners `E1 = (1,1)`, `E2 = (0,1)`, `E3 = (0,0)`, `E4 = (1,0)`.
/// Opposite edges `E1`, `E3` form the diagonal through the centre.
pub struct Star;

impl Star {
    pub const TIPS: [[f64; 2]; 4] = [[1.0, 1.0], [0.0, 1.0], [0.0, 0.0], [1.0, 0.0]];

    /// The point at relative radius `r` on edge `e` (0-based), at height `h`.
    pub fn point(e: usize, r: f64, h: f64) -> Vec<f64> {
        let tip = Self::TIPS[e];
        vec![0.5 + (tip[0] - 0.5) * r, 0.5 + (tip[1] - 0.5) * r, h]
    }

    /// Sample of `E_e` between relative radii `r0` and `r1`.
    pub fn sub_edge(e: usize, r0: f64, r1: f64, step: f64) -> Result<Cloud<f64>> {
        segment_cloud("sub-edge", &Self::point(e, r0, 0.0), &Self::point(e, r1, 0.0), step)
    }

    /// Union of `[centre, radius r_e]` over the four edges.
    pub fn centre_star(radii: [f64; 4], step: f64) -> Result<Cloud<f64>> {
        let parts: Vec<Cloud<f64>> =
            (0..4).map(|e| Self::sub_edge(e, 0.0, radii[e], step)).collect::<Result<_>>()?;
        let refs: Vec<&Cloud<f64>> = parts.iter().collect();
        Ok(Cloud::union("centre-star", &refs)?.dedup())
    }

    pub fn edges(which: &[usize], step: f64) -> Result<Cloud<f64>> {
        let parts: Vec<Cloud<f64>> = which.iter().map(|&e| Self::sub_edge(e, 0.0, 1.0, step)).collect::<Result<_>>()?;
        let refs: Vec<&Cloud<f64>> = parts.iter().collect();
        Ok(Cloud::union("edges", &refs)?.dedup())
    }

    fn curves<'a>() -> Vec<Curve<'a>> {
        (0..4).map(|e| Curve::segment(Self::point(e, 0.0, 0.0), Self::point(e, 1.0, 0.0), 1, 1.0)).collect()
    }
}

/// One leg of a route: from relative radius `from` on edge `e0` to radius
/// `to` on edge `e1`; one of the two radii is 0, so the leg is straight.
#[derive(Clone, Copy, Debug)]
struct Leg {
    e: usize,
    from: f64,
    to: f64,
}

impl Leg {
    fn out(e: usize, to: f64) -> Self {
        Self { e, from: 0.0, to }
    }

    fn back(e: usize, from: f64) -> Self {
        Self { e, from, to: 0.0 }
    }

    fn radius(&self, s: f64) -> f64 {
        self.from + (self.to - self.from) * s
    }
}

/// Height above the star at oscillation parameter `tau`.
fn height(tau: f64) -> f64 {
    1.0 / (1.0 + tau)
}

/// Quotient coordinate: the star sits at 1.
fn base_of(tau: f64) -> f64 {
    tau / (1.0 + tau)
}

/// A quasi-arc that repeats one fixed route through the star, one
/// oscillation per unit of `tau`, descending as `1/(1 + tau)`:
/// `tip o1 -> c -> tip o2 -> c -> tip o3 -> c -> tip o4 -> c -> tip o1`.
#[derive(Clone, Debug)]
pub struct StarRoute {
    pub samples: usize,
    pub order: [usize; 4],
    pub oscillations: usize,
}

impl StarRoute {
    pub fn new(samples: usize, order: [usize; 4]) -> Result<Self> {
        let mut seen = [false; 4];
        for &e in &order {
            if e >= 4 || seen[e] {
                return domain(format!("{order:?} is not a permutation of the four edges"));
            }
            seen[e] = true;
        }
        let oscillations = (samples / 2000).clamp(4, 64);
        Ok(Self { samples, order, oscillations })
    }

    fn legs(&self) -> [Leg; 8] {
        let o = self.order;
        let mut legs = [Leg::out(0, 0.0); 8];
        for i in 0..4 {
            legs[2 * i] = Leg::back(o[i], 1.0);
            legs[2 * i + 1] = Leg::out(o[(i + 1) % 4], 1.0);
        }
        legs
    }

    pub fn eval(&self, tau: f64) -> Vec<f64> {
        let legs = self.legs();
        let u = tau * 8.0;
        let k = (u.floor() as usize).min(8 * self.oscillations - 1);
        let leg = legs[k % 8];
        Star::point(leg.e, leg.radius(u - k as f64), height(tau))
    }

    /// Residual height of the cut-off tail, in the metric.
    pub fn cutoff_error(&self) -> f64 {
        0.125 * height(self.oscillations as f64)
    }

    pub fn cloud(&self) -> Result<Cloud<f64>> {
        let k = self.oscillations as f64;
        let arc = Curve::new(seeds(0.0, k, 32 * self.oscillations), 0, |t| self.eval(t), base_of);
        let mut curves = vec![arc];
        curves.extend(Star::curves());
        let traced = trace(&curves, self.samples, 0.0);
        let mesh = traced.chain.max(self.cutoff_error());
        let tranche = TrancheInfo { base: 1.0, level: 1, label: "4-star".into() };
        traced.into_cloud("star4_route", mesh, &TAG_NAMES, vec![tranche])
    }

    /// Quotient coordinates of the leg boundaries, each leg cut into
    /// `per_leg` pieces.
    pub fn arc_nodes(&self, per_leg: usize) -> Vec<f64> {
        let n = 8 * self.oscillations * per_leg.max(1);
        (0..=n).map(|i| base_of(i as f64 * self.oscillations as f64 / n as f64)).collect()
    }
}

/// A quasi-arc through the star in the same plane-with-height layout; block
/// `(k, i, j)` of level `k` runs `c -> tip 1 -> c -> (i/k on E2) -> c ->
/// (j/k on E3) -> c -> tip 4 -> c`, so the level-`k` blocks pass near every
/// element of the `1/k`-net of subcontinua of the star.
#[derive(Clone, Debug)]
pub struct StarGood {
    pub samples: usize,
    pub levels: usize,
}

/// Subcontinua of the star: sub-edges `[r0, r1]` of one edge and centre
/// stars with one radius per edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NetElement {
    SubEdge { e: usize, r0: f64, r1: f64 },
    CentreStar([f64; 4]),
}

impl NetElement {
    pub fn cloud(&self, step: f64) -> Result<Cloud<f64>> {
        match *self {
            NetElement::SubEdge { e, r0, r1 } => Star::sub_edge(e, r0, r1, step),
            NetElement::CentreStar(r) => Star::centre_star(r, step),
        }
    }
}

impl StarGood {
    pub fn new(samples: usize) -> Self {
        Self { samples, levels: 8 }
    }

    fn blocks(k: usize) -> usize {
        (k + 1) * (k + 1)
    }

    /// Start of level `k` (1-based) in `tau`; level `k` spans `[k - 1, k]`.
    fn block_span(&self, k: usize, i: usize, j: usize) -> (f64, f64) {
        let w = 1.0 / Self::blocks(k) as f64;
        let b = (i * (k + 1) + j) as f64;
        ((k - 1) as f64 + b * w, (k - 1) as f64 + (b + 1.0) * w)
    }

    fn block_legs(k: usize, i: usize, j: usize) -> [Leg; 8] {
        let (r2, r3) = (i as f64 / k as f64, j as f64 / k as f64);
        [
            Leg::out(0, 1.0),
            Leg::back(0, 1.0),
            Leg::out(1, r2),
            Leg::back(1, r2),
            Leg::out(2, r3),
            Leg::back(2, r3),
            Leg::out(3, 1.0),
            Leg::back(3, 1.0),
        ]
    }

    pub fn eval(&self, tau: f64) -> Vec<f64> {
        let tau = tau.clamp(0.0, self.levels as f64);
        let k = ((tau.floor() as usize) + 1).min(self.levels);
        let n = Self::blocks(k);
        let frac = tau - (k - 1) as f64;
        let b = ((frac * n as f64).floor() as usize).min(n - 1);
        let (i, j) = (b / (k + 1), b % (k + 1));
        let u = (frac * n as f64 - b as f64) * 8.0;
        let l = (u.floor() as usize).min(7);
        let leg = Self::block_legs(k, i, j)[l];
        Star::point(leg.e, leg.radius(u - l as f64), height(tau))
    }

    pub fn cutoff_error(&self) -> f64 {
        0.125 * height(self.levels as f64)
    }

    pub fn cloud(&self) -> Result<Cloud<f64>> {
        let mut leg_seeds = Vec::new();
        for k in 1..=self.levels {
            for b in 0..Self::blocks(k) {
                let (lo, hi) = self.block_span(k, b / (k + 1), b % (k + 1));
                leg_seeds.extend(seeds(lo, hi, 16));
                leg_seeds.pop();
            }
        }
        leg_seeds.push(self.levels as f64);
        let arc = Curve::new(leg_seeds, 0, |t| self.eval(t), base_of);
        let mut curves = vec![arc];
        curves.extend(Star::curves());
        let traced = trace(&curves, self.samples, 0.0);
        let mesh = traced.chain.max(self.cutoff_error());
        let tranche = TrancheInfo { base: 1.0, level: 1, label: "4-star".into() };
        traced.into_cloud("star4_good", mesh, &TAG_NAMES, vec![tranche])
    }

    /// The `1/k`-net: every sub-edge with endpoints on the grid and every
    /// centre star with grid radii.
    pub fn net(k: usize) -> Vec<NetElement> {
        let g = |i: usize| i as f64 / k as f64;
        let mut out = Vec::new();
        for e in 0..4 {
            for a in 0..=k {
                for b in a + 1..=k {
                    out.push(NetElement::SubEdge { e, r0: g(a), r1: g(b) });
                }
            }
        }
        for a in 0..=k {
            for b in 0..=k {
                for c in 0..=k {
                    for d in 0..=k {
                        out.push(NetElement::CentreStar([g(a), g(b), g(c), g(d)]));
                    }
                }
            }
        }
        out
    }

    /// The sub-arc of the last level that follows `el`, as a quotient
    /// interval. Radii are rounded to the level's grid.
    pub fn witness(&self, el: &NetElement) -> (f64, f64) {
        let k = self.levels;
        let idx = |r: f64| ((r * k as f64).round() as usize).min(k);
        let (lo, hi) = match *el {
            NetElement::SubEdge { e, r0, r1 } => {
                let (i, j) = (k, k);
                let (a, b) = self.block_span(k, i, j);
                let w = (b - a) / 8.0;
                let leg = 2 * e;
                (a + w * (leg as f64 + r0), a + w * (leg as f64 + r1))
            }
            NetElement::CentreStar(r) => {
                let (a, b) = self.block_span(k, idx(r[1]), idx(r[2]));
                let w = (b - a) / 8.0;
                (a + w * (2.0 - r[0]), a + w * (6.0 + r[3]))
            }
        };
        (base_of(lo), base_of(hi))
    }
}

/// `star4_route` with the given traversal order (0-based edges).
pub fn star4_route(samples: usize, order: [usize; 4]) -> Result<Cloud<f64>> {
    StarRoute::new(samples, order)?.cloud()
}

pub fn star4_good(samples: usize) -> Result<Cloud<f64>> {
    StarGood::new(samples).cloud()
}
