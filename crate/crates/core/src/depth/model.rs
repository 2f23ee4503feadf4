use rayon::prelude::*;

use super::seq::{IndexSeq, LapTable};
use crate::curves::{depth_extrema, depth_f_unchecked, invert_monotone, truncated_unchecked, ExtremaTable};
use crate::error::{domain, Error, Result};
use crate::scalar::Real;

/// Tolerance for intermediate values of `g` landing in their intervals.
pub const G_DOMAIN_TOL: f64 = 1e-8;

/// Increasing affine bijection from `[lo, hi]` onto [0, 1].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineH<S> {
    pub lo: S,
    pub hi: S,
}

impl<S: Real> AffineH<S> {
    pub fn apply(&self, v: S) -> S {
        (v - self.lo).quot(self.hi - self.lo)
    }

    pub fn inverse(&self, s: S) -> S {
        self.lo + s * (self.hi - self.lo)
    }
}

/// Where a parameter sits relative to the laps `P^0_i = [y(i+1), z(i)]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Loc {
    /// Inside `P^0_i`.
    Lap(usize),
    /// In `(z(i), y(i))`, where the map falls.
    Gap(usize),
    /// Below the deepest tabulated minimum.
    Below,
}

/// Extrema, affine rescalings and nested laps for the infinite-depth
/// construction over the scalar `S`.
#[derive(Clone, Debug)]
pub struct DepthModel<S> {
    table: ExtremaTable<S>,
    laps: LapTable<S>,
    i_max: usize,
    n_max: usize,
}

impl<S: Real> DepthModel<S> {
    /// Tabulates `P^n_seq` for `i_0 <= i_max`, `n <= n_max`, with extrema
    /// available up to index `reach` (at least `i_max`) for lazy evaluation.
    pub fn new(i_max: usize, n_max: usize, reach: usize) -> Result<Self> {
        if i_max == 0 {
            return domain("i_max must be positive");
        }
        let table = depth_extrema::<S>(reach.max(i_max) + 1)?;
        let mut model = Self { table, laps: LapTable::default(), i_max, n_max };
        for level in 0..=n_max {
            let seqs = IndexSeq::all(i_max, level);
            let built: Vec<(IndexSeq, (S, S))> = seqs
                .into_par_iter()
                .map(|seq| {
                    let iv = model.pull_back(&seq)?;
                    Ok((seq, iv))
                })
                .collect::<Result<_>>()?;
            model.laps.entries.extend(built);
        }
        Ok(model)
    }

    pub fn table(&self) -> &ExtremaTable<S> {
        &self.table
    }

    pub fn lap_table(&self) -> &LapTable<S> {
        &self.laps
    }

    pub fn i_max(&self) -> usize {
        self.i_max
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Deepest lap index with tabulated extrema.
    pub fn reach(&self) -> usize {
        self.table.count() - 1
    }

    pub fn f(&self, t: S) -> S {
        depth_f_unchecked(t)
    }

    /// `f_i`: the depth map above `y(i+1)`, linear below.
    pub fn f_trunc(&self, i: usize, t: S) -> S {
        truncated_unchecked(&self.table, i, t)
    }

    pub fn affine_h(&self, i: usize) -> Result<AffineH<S>> {
        if i == 0 || i > self.reach() {
            return domain(format!("h_{i} needs extrema beyond the table"));
        }
        let h = AffineH { lo: self.table.fy(i + 1), hi: self.table.fz(i) };
        if !(h.hi > h.lo) {
            return Err(Error::Construction(format!("f(P^0_{i}) is degenerate")));
        }
        Ok(h)
    }

    fn h(&self, i: usize) -> AffineH<S> {
        AffineH { lo: self.table.fy(i + 1), hi: self.table.fz(i) }
    }

    pub fn p0(&self, i: usize) -> (S, S) {
        self.table.p0(i)
    }

    pub fn locate(&self, s: S) -> Loc {
        let n = self.reach();
        if s < self.table.y(n + 1) {
            return Loc::Below;
        }
        // smallest j with y(j+1) <= s; y is decreasing in j
        let (mut lo, mut hi) = (1usize, n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.table.y(mid + 1) <= s {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        if s <= self.table.z(lo) {
            Loc::Lap(lo)
        } else {
            Loc::Gap(lo)
        }
    }

    /// `h_i(f(s))`, the rescaled image of a point of `P^0_i`.
    pub fn sigma(&self, i: usize, s: S) -> S {
        self.h(i).apply(self.f(s))
    }

    /// Inverse of `sigma(i, .)` on `P^0_i`, where `f` increases.
    pub fn sigma_inv(&self, i: usize, s: S) -> S {
        let v = self.h(i).inverse(s);
        let (a, b) = self.p0(i);
        if s <= S::zero() {
            return a;
        }
        if s >= S::one() {
            return b;
        }
        invert_monotone(|t| self.f(t), a, b, true, v)
    }

    fn pull_back(&self, seq: &IndexSeq) -> Result<(S, S)> {
        let i0 = seq.head();
        if i0 > self.reach() {
            return Err(Error::Resolution(format!("{seq:?} needs extrema beyond index {}", self.reach())));
        }
        match seq.tail() {
            None => Ok(self.p0(i0)),
            Some(rest) => {
                let (a, b) = self.build_pn(&rest)?;
                Ok((self.sigma_inv(i0, a), self.sigma_inv(i0, b)))
            }
        }
    }

    /// `P^n_seq`, from the table when tabulated.
    pub fn build_pn(&self, seq: &IndexSeq) -> Result<(S, S)> {
        match self.laps.get(seq) {
            Some(iv) => Ok(iv),
            None => self.pull_back(seq),
        }
    }

    /// `g_seq(t)`, checking that every intermediate value lands in the
    /// interval the composition needs.
    pub fn g_eval(&self, seq: &IndexSeq, t: S) -> Result<S> {
        let tol = S::lit(G_DOMAIN_TOL);
        let idx = seq.indices();
        let (a, b) = self.build_pn(seq)?;
        if t < a - tol || t > b + tol {
            return domain(format!("t = {:?} outside {seq:?} = [{:?}, {:?}]", t, a, b));
        }
        let mut s = t;
        for (k, &i) in idx.iter().enumerate() {
            s = self.sigma(i, s);
            if k + 1 < idx.len() {
                let rest = IndexSeq::new(idx[k + 1..].to_vec())?;
                let (c, d) = self.build_pn(&rest)?;
                if s < c - tol || s > d + tol {
                    return domain(format!(
                        "well-definedness: step {k} of {seq:?} gives {:?} outside {rest:?} = [{:?}, {:?}]",
                        s, c, d
                    ));
                }
            } else if s < -tol || s > S::one() + tol {
                return domain(format!("well-definedness: last step of {seq:?} gives {:?}", s));
            }
        }
        let last = *idx.last().unwrap();
        Ok(self.f_trunc(last, s.max(S::zero()).min(S::one())))
    }

    /// `Psi^cap_m(s)`: the lifted arc over [0, 1] whose first map is `f_cap`
    /// and whose nested laps use indices at most `cap`. With `cap = None`
    /// the untruncated map is used, giving `phi_m(s)`.
    ///
    /// Coordinates: `s`, `f(s)`, then `2^-(k+1) g_{i_0..i_k}(s)` while `s`
    /// stays inside nested laps.
    pub fn psi(&self, m: usize, cap: Option<usize>, s: S) -> Vec<S> {
        let mut out = Vec::with_capacity(m + 2);
        out.push(s);
        out.push(match cap {
            Some(_) if s <= S::zero() => S::zero(),
            Some(c) => self.f_trunc(c, s),
            None => self.f(s),
        });
        let mut cap = cap.unwrap_or(usize::MAX).min(self.reach());
        let mut cur = s;
        let mut w = S::lit(0.5);
        for _ in 0..m {
            match self.locate(cur) {
                Loc::Lap(j) if j <= cap && cur > S::zero() => {
                    cur = self.sigma(j, cur).max(S::zero()).min(S::one());
                    out.push(w * self.f_trunc(j, cur));
                    cap = j;
                    w = w * S::lit(0.5);
                }
                _ => break,
            }
        }
        out.resize(m + 2, S::zero());
        out
    }

    /// `phi_n(t)` for `t` in (0, 1].
    pub fn phi(&self, n: usize, t: S) -> Result<Vec<S>> {
        if !(t > S::zero() && t <= S::one()) {
            return domain(format!("phi needs t in (0,1], got {:?}", t));
        }
        if let Loc::Below = self.locate(t) {
            return Err(Error::Resolution(format!("t = {:?} is below the tabulated laps", t)));
        }
        Ok(self.psi(n, None, t))
    }
}
