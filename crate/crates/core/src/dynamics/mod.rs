//! The shift `sigma` on the tent-relation product: orbits, itineraries
//! through the vertical tranches, exactness witnesses and entropy bounds.

use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curves::{tent_relation_tol, tent_value};
use crate::error::{domain, Result};
use crate::hilbert::{hausdorff, product_metric, Cloud, HPoint};

/// Tolerance for consecutive coordinates to satisfy the tent relation.
pub const ADMISSIBLE_TOL: f64 = 1e-9;

/// Whether every consecutive pair of coordinates lies in the relation.
pub fn admissible(x: &HPoint<f64>) -> bool {
    x.coords().windows(2).all(|w| tent_relation_tol(w[0], w[1], ADMISSIBLE_TOL).unwrap_or(false))
}

/// `(x, sigma x, ..., sigma^n x)`; each iterate loses its first coordinate.
pub fn sigma_orbit(x: &HPoint<f64>, n: usize) -> Result<Vec<HPoint<f64>>> {
    if !admissible(x) {
        return domain(format!("{:?} is not admissible", x.coords()));
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(x.clone());
    for _ in 0..n {
        let next = out.last().unwrap().left_shift();
        out.push(next);
    }
    Ok(out)
}

/// The point spelling `word` in its first coordinates and 0 up to `dim`.
/// Any 0/1 sequence is admissible since `{0, 1} x [0, 1]` lies in the relation.
pub fn realize_itinerary(word: &[u8], dim: usize) -> Result<HPoint<f64>> {
    if word.len() > dim {
        return domain(format!("word of length {} does not fit in {dim} coordinates", word.len()));
    }
    if let Some(s) = word.iter().find(|&&s| s > 1) {
        return domain(format!("itineraries use the symbols 0 and 1, got {s}"));
    }
    let mut c: Vec<f64> = word.iter().map(|&s| s as f64).collect();
    c.resize(dim, 0.0);
    HPoint::new(c)
}

/// A forward tent orbit from a uniform start, with a uniform choice on the
/// vertical segments.
pub fn random_point(rng: &mut impl Rng, dim: usize) -> HPoint<f64> {
    let mut c = Vec::with_capacity(dim);
    let mut x: f64 = rng.gen();
    for _ in 0..dim {
        c.push(x);
        x = if x <= 0.0 || x >= 1.0 { rng.gen() } else { tent_value(x) };
    }
    HPoint::new(c).expect("tent values stay in [0, 1]")
}

/// Bowen distance `max_{i < n} d(sigma^i x, sigma^i y)`.
pub fn bowen_distance(x: &HPoint<f64>, y: &HPoint<f64>, n: usize) -> f64 {
    let (mut a, mut b) = (x.clone(), y.clone());
    let mut d = 0.0f64;
    for _ in 0..n.max(1) {
        d = d.max(product_metric(&a, &b));
        a = a.left_shift();
        b = b.left_shift();
    }
    d
}

#[derive(Clone, Copy, Debug)]
pub struct EntropyOptions {
    /// Coordinates kept per point.
    pub dim: usize,
    /// Random orbits added after the itinerary points.
    pub budget: usize,
    pub seed: u64,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        Self { dim: 16, budget: 256, seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EntropyBound {
    pub n: usize,
    pub eps: f64,
    /// Separation level the set was built at, at least `eps`.
    pub level: f64,
    pub separated: usize,
    pub bound: f64,
}

/// Separation levels `2^(-k/8)`; sets built at a level above `eps` are
/// also `eps`-separated.
fn levels() -> impl Iterator<Item = f64> {
    (0..=160).map(|k| 2f64.powf(-(k as f64) / 8.0))
}

/// `(1/n) log |S|` for the largest greedy `(n, eps')`-separated set `S`
/// over levels `eps' >= eps`, among the `2^n` itinerary points (if they fit
/// in the budget's dimension) followed by `budget` random orbits.
///
/// Taking the best level above `eps` keeps the bound nonincreasing in `eps`,
/// which a single greedy pass does not guarantee.
pub fn entropy_lower_bound(n: usize, eps: f64, opts: EntropyOptions) -> Result<EntropyBound> {
    if n == 0 || n > 12 {
        return domain("entropy bounds need 1 <= n <= 12");
    }
    let mesh = 0.5f64.powi(opts.dim as i32 + 1);
    if !(eps >= 2.0 * mesh) {
        return domain(format!("eps = {eps} is below twice the truncation error {mesh}"));
    }
    let dim = opts.dim.max(n);
    let mut cand: Vec<HPoint<f64>> = (0..1u32 << n)
        .map(|w| {
            let word: Vec<u8> = (0..n).map(|i| ((w >> i) & 1) as u8).collect();
            realize_itinerary(&word, dim).expect("word fits")
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    cand.extend((0..opts.budget).map(|_| random_point(&mut rng, dim)));
    let m = cand.len();
    let dist: Vec<f64> = (0..m * m)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / m, k % m);
            if i < j {
                bowen_distance(&cand[i], &cand[j], n)
            } else {
                0.0
            }
        })
        .collect();
    let d = |i: usize, j: usize| if i < j { dist[i * m + j] } else { dist[j * m + i] };
    let mut best = (1usize, eps);
    for level in levels().filter(|&l| l >= eps) {
        let mut set: Vec<usize> = Vec::new();
        for i in 0..m {
            if set.iter().all(|&j| d(i, j) > level) {
                set.push(i);
            }
        }
        if set.len() > best.0 {
            best = (set.len(), level);
        }
    }
    Ok(EntropyBound { n, eps, level: best.1, separated: best.0, bound: (best.0 as f64).ln() / n as f64 })
}

#[derive(Clone, Debug, Serialize)]
pub struct Exactness {
    /// Smallest `n` with `d_H(sigma^n U, X) <= 3 mesh`.
    pub n: Option<usize>,
    /// `d_H(sigma^k U, X)` for `k = 0..`, up to the witness or `max_n`.
    pub distances: Vec<f64>,
    pub tolerances: Vec<f64>,
    pub best: f64,
}

/// Searches for `n <= max_n` with `sigma^n(U)` within `3 mesh` of `xhat`,
/// comparing against `xhat` truncated to the dimension of `sigma^n(U)`.
pub fn exactness_witness(u: &Cloud<f64>, xhat: &Cloud<f64>, max_n: usize) -> Result<Exactness> {
    let mut cur = u.clone();
    let mut out = Exactness { n: None, distances: Vec::new(), tolerances: Vec::new(), best: f64::INFINITY };
    for k in 0..=max_n {
        let reference = xhat.truncate(cur.dim());
        let d = hausdorff(&cur, &reference)?;
        let tol = 3.0 * cur.mesh().max(reference.mesh());
        out.distances.push(d);
        out.tolerances.push(tol);
        out.best = out.best.min(d);
        if d <= tol {
            out.n = Some(k);
            break;
        }
        if cur.dim() == 1 {
            break;
        }
        cur = cur.left_shift();
    }
    Ok(out)
}
