use std::f64::consts::PI;

use super::{curve_cloud, seeds, trace, Curve};
use crate::error::Result;
use crate::hilbert::{Cloud, TrancheInfo};

pub const TAG_NAMES: [&str; 3] = ["quasi-arc", "connector", "limit"];

/// Planar scale: radius 1 maps to 1/4 about `(1/2, 1/2)`.
const SCALE: f64 = 0.25;

/// A ray `r(t) = 1 + 1/(1 + t)` accumulating on the unit circle, with the
/// angle swinging back and forth as `pi - A(t) cos t`,
/// `A(t) = pi (1 - t/(1+t)^2)`. The swing widens towards the full circle
/// but never crosses angle 0, where a radial connector joins the start of
/// the ray (radius 2, angle 0) to the circle.
///
/// Quotient coordinate: `t/(1+t)` on the ray, 1 on the circle, and `-s` at
/// relative position `s` along the connector from the ray's start. The
/// quotient is a circle through the collapsed limit circle.
#[derive(Clone, Copy, Debug)]
pub struct Spiral {
    pub samples: usize,
    pub t_cut: f64,
}

impl Spiral {
    pub fn new(samples: usize) -> Self {
        let turns = (samples / 1000).clamp(8, 200);
        Self { samples, t_cut: 2.0 * PI * turns as f64 }
    }

    pub fn radius(t: f64) -> f64 {
        1.0 + 1.0 / (1.0 + t)
    }

    pub fn angle(t: f64) -> f64 {
        let amp = PI * (1.0 - t / ((1.0 + t) * (1.0 + t)));
        PI - amp * t.cos()
    }

    pub fn polar(r: f64, a: f64) -> Vec<f64> {
        vec![0.5 + SCALE * r * a.cos(), 0.5 + SCALE * r * a.sin()]
    }

    pub fn eval(t: f64) -> Vec<f64> {
        Self::polar(Self::radius(t), Self::angle(t))
    }

    /// Bound on the distance from the cut tail to the circle: the radial
    /// excess times the largest coordinate weight.
    pub fn cutoff_error(&self) -> f64 {
        0.5 * SCALE * (Self::radius(self.t_cut) - 1.0)
    }

    pub fn cloud(&self) -> Result<Cloud<f64>> {
        let turns = (self.t_cut / (2.0 * PI)).round() as usize;
        let ray = Curve::new(seeds(0.0, self.t_cut, 32 * turns), 0, Self::eval, |t| t / (1.0 + t));
        let connector = Curve::new(seeds(0.0, 1.0, 4), 1, |s| Self::polar(2.0 - s, 0.0), |s| -s);
        let circle = Curve::new(seeds(0.0, 2.0 * PI, 32), 2, |a| Self::polar(1.0, a), |_| 1.0);
        let traced = trace(&[ray, connector, circle], self.samples, 0.0);
        let mesh = traced.chain.max(self.cutoff_error());
        let tranche = TrancheInfo { base: 1.0, level: 1, label: "circle".into() };
        traced.into_cloud("circle_spiral", mesh, &TAG_NAMES, vec![tranche])
    }

    /// Quotient coordinates of the swing turning points `t = k pi`, each
    /// half swing cut into `per_swing` pieces.
    pub fn arc_nodes(&self, per_swing: usize, from_t: f64) -> Vec<f64> {
        let per = per_swing.max(1);
        let k0 = (from_t / PI).floor() as usize;
        let k1 = (self.t_cut / PI).floor() as usize;
        let mut out = Vec::new();
        for k in k0..k1 {
            for i in 0..per {
                let t = (k as f64 + i as f64 / per as f64) * PI;
                out.push(t / (1.0 + t));
            }
        }
        out.push(self.t_cut / (1.0 + self.t_cut));
        out
    }

    /// Arc of the limit circle between two angles.
    pub fn circle_arc(a0: f64, a1: f64, n: usize) -> Result<Cloud<f64>> {
        curve_cloud("Y0", a0, a1, n, |a| Self::polar(1.0, a))
    }
}

pub fn circle_spiral(samples: usize) -> Result<Cloud<f64>> {
    Spiral::new(samples).cloud()
}
