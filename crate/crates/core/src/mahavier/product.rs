use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::curves::TentFamily;
use crate::error::{domain, Result};
use crate::hilbert::{Cloud, CloudMeta, TrancheInfo};

/// Sampling controls for the tent-relation products `X_n`.
#[derive(Clone, Copy, Debug)]
pub struct ProductOptions {
    /// Covering radius the sample must reach.
    pub tol: f64,
    /// Share of the radius spent on merging nearby samples. Above 1/4 the
    /// lift through the slope-4 branch needs finer pieces at every level.
    pub thin: f64,
}

impl Default for ProductOptions {
    fn default() -> Self {
        Self { tol: 0.1, thin: 0.25 }
    }
}

#[derive(Debug)]
struct Piece {
    dim: usize,
    data: Vec<f64>,
    mesh: f64,
}

impl Piece {
    fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

/// Tolerances are rounded down to this geometric ladder so recursive
/// pieces are shared.
const LADDER: f64 = 1.0905077326652577; // 2^(1/8)

fn ladder_index(e: f64) -> i32 {
    (e.ln() / LADDER.ln()).floor() as i32
}

fn ladder_value(k: i32) -> f64 {
    LADDER.powi(k)
}

/// Builds samples of `X_n` with a certified covering radius.
///
/// `X_n` is the union of `{0} x X_{n-1}`, `{1} x X_{n-1}` and, for every
/// tent branch, the lift `y -> (branch^-1(y_0), y)` of `X_{n-1}`. A lift
/// through a branch of slope `l` scales errors by at most `1/2 + 1/l`;
/// branches squeezed against 0 and 1 are covered by the vertical copies.
pub struct ProductBuilder {
    opts: ProductOptions,
    memo: Mutex<HashMap<(usize, i32), Arc<Piece>>>,
}

impl ProductBuilder {
    pub fn new(opts: ProductOptions) -> Result<Self> {
        let ok = |v: f64| v > 0.0 && v < 1.0;
        if !(opts.tol > 0.0 && ok(opts.thin)) {
            return domain("product options need tol > 0 and thin in (0, 1)");
        }
        Ok(Self { opts, memo: Mutex::new(HashMap::new()) })
    }

    fn piece(&self, n: usize, k: i32) -> Arc<Piece> {
        if let Some(p) = self.memo.lock().unwrap().get(&(n, k)).cloned() {
            return p;
        }
        let p = Arc::new(self.compute(n, ladder_value(k)));
        self.memo.lock().unwrap().insert((n, k), p.clone());
        p
    }

    fn piece_within(&self, n: usize, e: f64) -> Arc<Piece> {
        self.piece(n, ladder_index(e))
    }

    fn compute(&self, n: usize, e: f64) -> Piece {
        let diam = 1.0 - 0.5f64.powi(n as i32 + 1);
        if e >= diam {
            return Piece { dim: n + 1, data: vec![0.0; n + 1], mesh: diam };
        }
        if n == 0 {
            let k = (1.0 / (4.0 * e)).ceil() as usize;
            let data = (0..=k).map(|i| i as f64 / k as f64).collect();
            return Piece { dim: 1, data, mesh: 0.25 / k as f64 };
        }
        let r = self.opts.thin * e;
        let b = e - r;
        // The vertical copies are sampled like the parent, so the fiber over
        // 0 is the sample one level down. Branches inside [a_{-m}, a_m]
        // are lifted; the rest lie within a_{-m} of a vertical copy.
        let vertical = self.piece_within(n - 1, e);
        let mut m = 0i64;
        while 1.0 / (((m + 2) * (m + 2)) as f64) > (2.0 * b - vertical.mesh).max(0.0) {
            m += 1;
        }
        let fam = TentFamily::<f64>::new(m + 1);
        let edge = fam.a(-m);
        let mut mesh = 0.5 * edge + 0.5 * vertical.mesh;
        let mut rows: Vec<(f64, &Piece, usize)> = Vec::new();
        let mut lifts = Vec::new();
        for t in -m..=m {
            let lam = fam.slope(t);
            let child = self.piece_within(n - 1, b / (0.5 + 1.0 / lam));
            mesh = mesh.max((0.5 + 1.0 / lam) * child.mesh);
            lifts.push((t, lam, child));
        }
        for x0 in [0.0, 1.0] {
            for i in 0..vertical.len() {
                rows.push((x0, &vertical, i));
            }
        }
        let mut net = Net::new(n + 1, r);
        let mut row = vec![0.0; n + 1];
        let mut push = |x0: f64, tail: &[f64]| {
            row[0] = x0;
            row[1..].copy_from_slice(tail);
            net.admit(&row);
        };
        for (x0, p, i) in rows {
            push(x0, p.row(i));
        }
        for (t, lam, child) in &lifts {
            let (a, c) = fam.interval(*t);
            for i in 0..child.len() {
                let y = child.row(i);
                push((a + y[0] / lam).min(c), y);
                push((c - y[0] / lam).max(a), y);
            }
        }
        let data = net.kept;
        Piece { dim: n + 1, data, mesh: mesh + r }
    }

    /// Sample of `X_n`; the mesh is a certified covering radius at most
    /// `tol`, up to floating-point rounding.
    pub fn build(&self, n: usize) -> Result<Cloud<f64>> {
        let top = self.piece_within(n, self.opts.tol);
        let base: Vec<f64> = (0..top.len()).map(|i| top.row(i)[0]).collect();
        let tranches = if n >= 1 {
            [0.0, 1.0].iter().map(|&b| TrancheInfo { base: b, level: 1, label: "vertical".into() }).collect()
        } else {
            Vec::new()
        };
        Cloud::from_flat(format!("X_{n}"), top.mesh, top.dim, top.data.clone())?
            .with_meta(CloudMeta { base: Some(base), tranches, ..Default::default() })
    }

    /// Number of memoized pieces, for diagnostics.
    pub fn pieces(&self) -> usize {
        self.memo.lock().unwrap().len()
    }
}

/// Greedy `r`-net: a point is kept unless an earlier kept point lies
/// within `r`. Candidates come from a hash on the first three coordinates.
struct Net {
    r: f64,
    dim: usize,
    kept: Vec<f64>,
    cells: HashMap<[i64; 3], Vec<u32>>,
}

impl Net {
    fn new(dim: usize, r: f64) -> Self {
        Self { r, dim, kept: Vec::new(), cells: HashMap::new() }
    }

    fn key(&self, p: &[f64]) -> [i64; 3] {
        let mut k = [0i64; 3];
        for (i, v) in p.iter().take(3).enumerate() {
            k[i] = (v / (self.r * 2f64.powi(i as i32 + 1))).floor() as i64;
        }
        k
    }

    fn admit(&mut self, p: &[f64]) {
        let k = self.key(p);
        for i in -1..=1 {
            for j in -1..=1 {
                for l in -1..=1 {
                    if let Some(ids) = self.cells.get(&[k[0] + i, k[1] + j, k[2] + l]) {
                        for &id in ids {
                            let q = &self.kept[id as usize * self.dim..(id as usize + 1) * self.dim];
                            if within(p, q, self.r) {
                                return;
                            }
                        }
                    }
                }
            }
        }
        let id = (self.kept.len() / self.dim) as u32;
        self.kept.extend_from_slice(p);
        self.cells.entry(k).or_default().push(id);
    }
}

fn within(p: &[f64], q: &[f64], r: f64) -> bool {
    let mut w = 0.5;
    let mut sum = 0.0;
    for (a, b) in p.iter().zip(q) {
        sum += w * (a - b).abs();
        if sum > r {
            return false;
        }
        w *= 0.5;
    }
    true
}

/// `X_n` at the default resolution.
pub fn build_x_n(n: usize, opts: ProductOptions) -> Result<Cloud<f64>> {
    ProductBuilder::new(opts)?.build(n)
}

/// The depth-`d` truncation of the infinite product, with the truncation
/// error `2^-(d+1)` added to the mesh.
pub fn build_xhat(d: usize, opts: ProductOptions) -> Result<Cloud<f64>> {
    let c = build_x_n(d, opts)?;
    let mesh = c.mesh() + 0.5f64.powi(d as i32 + 1);
    Ok(c.with_mesh(mesh).with_label(format!("xhat_{d}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::tent_relation_tol;

    #[test]
    fn level_zero_is_the_segment() {
        let c = build_x_n(0, ProductOptions::default()).unwrap();
        assert_eq!(c.dim(), 1);
        assert!(c.mesh() <= 0.1);
        assert!(c.contains_point(&[0.0], 0.0) && c.contains_point(&[1.0], 0.0));
    }

    #[test]
    fn samples_are_admissible() {
        let c = build_x_n(3, ProductOptions { tol: 0.08, ..Default::default() }).unwrap();
        assert!(c.mesh() <= 0.08);
        for p in c.points() {
            for w in p.windows(2) {
                assert!(tent_relation_tol(w[0], w[1], 1e-9).unwrap(), "{p:?}");
            }
        }
    }
}
