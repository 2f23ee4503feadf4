use super::{segment_cloud, seeds, trace, Curve};
use crate::curves::depth_f;
use crate::error::Result;
use crate::hilbert::{Cloud, TrancheInfo};

pub const TAG_NAMES: [&str; 3] = ["quasi-arc", "base", "limit"];

/// The Warsaw circle `[0,1] x {0}` together with the closure of the graph
/// of `f(t) = (sin(pi/t) + 1 + 3t)/4` on `(0, 1/2]`, `5/4 - 5t/4` on
/// `[1/2, 1]`. The graph accumulates on the limit segment `{0} x [0, 1/2]`.
///
/// Quotient coordinate: `t` on the graph, `1 + s` at `(1 - s, 0)` on the base
/// segment, `0` on the limit segment. The quotient is a circle of length 2.
#[derive(Clone, Copy, Debug)]
pub struct Warsaw {
    pub samples: usize,
    /// The graph is sampled on `[t_min, 1]`.
    pub t_min: f64,
}

impl Warsaw {
    pub fn new(samples: usize) -> Self {
        // balances the cut-off error 0.69 t_min against the chain spacing
        let samples = samples.max(200);
        Self { samples, t_min: (0.2 / samples as f64).sqrt() }
    }

    /// Distance from the graph over `(0, t_min]` to the limit segment.
    pub fn cutoff_error(&self) -> f64 {
        0.6875 * self.t_min
    }

    pub fn cloud(&self) -> Result<Cloud<f64>> {
        let t_min = self.t_min;
        // f oscillates once per 2 in 1/t; 8 seeds per oscillation
        let hi = 1.0 / t_min;
        let steps = ((hi - 1.0) * 4.0).ceil() as usize;
        let mut graph_seeds: Vec<f64> = seeds(1.0, hi, steps).into_iter().map(|u| 1.0 / u).collect();
        graph_seeds.reverse();
        let graph = Curve::new(graph_seeds, 0, |t| vec![t, depth_f(t).unwrap()], |t| t);
        let base = Curve::new(seeds(0.0, 1.0, 8), 1, |s| vec![1.0 - s, 0.0], |s| 1.0 + s);
        let limit = Curve::segment(vec![0.0, 0.0], vec![0.0, 0.5], 2, 0.0);
        let traced = trace(&[graph, base, limit], self.samples, 0.0);
        let mesh = traced.chain.max(self.cutoff_error());
        let tranche = TrancheInfo { base: 0.0, level: 1, label: "limit segment".into() };
        traced.into_cloud("warsaw", mesh, &TAG_NAMES, vec![tranche])
    }

    /// Parameter window covering the last `laps` monotone laps above `t_min`.
    pub fn tail_window(&self, laps: usize) -> (f64, f64) {
        (self.t_min, 1.0 / (1.0 / self.t_min - laps as f64))
    }

    /// `{0} x [lo, hi]`, a subcontinuum of the tranche.
    pub fn limit_piece(&self, lo: f64, hi: f64, step: f64) -> Result<Cloud<f64>> {
        segment_cloud("Y0", &[0.0, lo], &[0.0, hi], step)
    }
}

/// The Warsaw circle with roughly `samples` points.
pub fn warsaw_circle(samples: usize) -> Result<Cloud<f64>> {
    Warsaw::new(samples).cloud()
}
