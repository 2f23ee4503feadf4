use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{domain, Error, Result};
use crate::scalar::Real;

/// `0.5((1-t) sin(1/t) + 1)` up to 0.7, then the chord to (1, 1).
pub fn warsaw_f<S: Real>(t: S) -> Result<S> {
    if !(t > S::zero() && t <= S::one()) {
        return domain(format!("warsaw_f needs t in (0,1], got {:?}", t));
    }
    let half = S::lit(0.5);
    let osc = |t: S| half * ((S::one() - t) * (S::one() / t).sin() + S::one());
    let knee = S::lit(0.7);
    if t <= knee {
        Ok(osc(t))
    } else {
        let v = osc(knee);
        Ok(v + (S::one() - v) * (t - knee) / (S::one() - knee))
    }
}

/// `(sin(pi/t) + 1 + 3t) / 4` on (0, 1/2] and `5/4 - 5t/4` on [1/2, 1].
pub fn depth_f<S: Real>(t: S) -> Result<S> {
    if !(t > S::zero() && t <= S::one()) {
        return domain(format!("depth_f needs t in (0,1], got {:?}", t));
    }
    Ok(depth_f_unchecked(t))
}

pub(crate) fn depth_f_unchecked<S: Real>(t: S) -> S {
    let q = S::lit(0.25);
    if t <= S::lit(0.5) {
        q * (S::one().quot(t).sin_pi() + S::one() + S::lit(3.0) * t)
    } else {
        S::lit(1.25) - S::lit(1.25) * t
    }
}

type Eval<S> = Arc<dyn Fn(S) -> S + Send + Sync>;

/// A continuous real map on a closed interval, with its monotone laps
/// found on first use.
#[derive(Clone)]
pub struct Map1D<S> {
    name: String,
    eval: Eval<S>,
    lo: S,
    hi: S,
    laps: Arc<OnceLock<Vec<(S, S)>>>,
}

impl<S> fmt::Debug for Map1D<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Map1D").field("name", &self.name).finish()
    }
}

impl<S: Real> Map1D<S> {
    pub fn new(name: impl Into<String>, lo: S, hi: S, eval: impl Fn(S) -> S + Send + Sync + 'static) -> Self {
        assert!(lo < hi, "empty domain");
        Self { name: name.into(), eval: Arc::new(eval), lo, hi, laps: Arc::new(OnceLock::new()) }
    }

    /// A map whose laps are known in closed form.
    pub fn with_laps(self, laps: Vec<(S, S)>) -> Self {
        let cell = OnceLock::new();
        let _ = cell.set(laps);
        Self { laps: Arc::new(cell), ..self }
    }

    /// `depth_f` restricted to [t_min, 1].
    pub fn depth(t_min: S) -> Self {
        Self::new("depth_f", t_min, S::one(), depth_f_unchecked)
    }

    /// `warsaw_f` restricted to [t_min, 1].
    pub fn warsaw(t_min: S) -> Self {
        Self::new("warsaw_f", t_min, S::one(), |t| warsaw_f(t).expect("in domain"))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> (S, S) {
        (self.lo, self.hi)
    }

    pub fn eval(&self, t: S) -> Result<S> {
        if t < self.lo || t > self.hi {
            return domain(format!("{} evaluated at {:?} outside [{:?}, {:?}]", self.name, t, self.lo, self.hi));
        }
        Ok((self.eval)(t))
    }

    pub(crate) fn at(&self, t: S) -> S {
        (self.eval)(t)
    }

    /// Sign of the central-difference slope at `t`.
    pub(crate) fn slope_sign(&self, t: S) -> i8 {
        let h = t.abs().max(S::lit(1e-3)) * S::bisect_tol().sqrt();
        let a = (t - h).max(self.lo);
        let b = (t + h).min(self.hi);
        let d = self.at(b) - self.at(a);
        if d > S::zero() {
            1
        } else if d < S::zero() {
            -1
        } else {
            0
        }
    }

    /// Critical points scanned from the top of the domain downwards on a
    /// grid uniform in 1/t, which keeps a fixed number of samples per
    /// oscillation of sin(c/t)-type maps. Each returned entry is
    /// `(t, is_max)`, ordered by decreasing `t`.
    pub fn critical_points(&self, limit: usize) -> Vec<(S, bool)> {
        let du = S::lit(1.0 / 32.0);
        let u_end = S::one().quot(self.lo.max(S::lit(1e-300)));
        let mut u = S::one().quot(self.hi);
        let mut prev_t = self.hi;
        let mut prev = self.slope_sign(prev_t);
        let mut out = Vec::new();
        while out.len() < limit && u < u_end {
            u = (u + du).min(u_end);
            let t = S::one().quot(u);
            let s = self.slope_sign(t);
            if s != 0 && prev != 0 && s != prev {
                // Increasing below and decreasing above is a maximum.
                let is_max = s > 0;
                out.push((self.bisect_critical(t, prev_t, s), is_max));
            }
            if s != 0 {
                prev = s;
                prev_t = t;
            }
        }
        out
    }

    fn bisect_critical(&self, mut lo: S, mut hi: S, lo_sign: i8) -> S {
        let two = S::lit(2.0);
        for _ in 0..200 {
            if hi - lo <= S::bisect_tol() * hi {
                break;
            }
            let mid = (lo + hi) / two;
            let s = self.slope_sign(mid);
            if s == lo_sign {
                lo = mid;
            } else if s == 0 {
                return mid;
            } else {
                hi = mid;
            }
        }
        (lo + hi) / two
    }

    /// Maximal monotone subintervals of the domain, ordered by increasing `t`.
    pub fn monotone_laps(&self) -> &[(S, S)] {
        self.laps.get_or_init(|| {
            let mut cuts: Vec<S> = self.critical_points(usize::MAX).into_iter().map(|(t, _)| t).collect();
            cuts.push(self.lo);
            cuts.reverse();
            cuts.push(self.hi);
            cuts.windows(2).map(|w| (w[0], w[1])).collect()
        })
    }

    /// Upper bound on the slope between grid neighbours, for continuity checks.
    pub fn grid_lipschitz(&self, n: usize) -> S {
        let step = (self.hi - self.lo) / S::from_usize(n).unwrap();
        (0..n)
            .map(|k| {
                let a = self.lo + step * S::from_usize(k).unwrap();
                ((self.at(a + step) - self.at(a)) / step).abs()
            })
            .fold(S::zero(), S::max)
    }
}

/// The unique `t` in `lap` with `f(t) = v`, by bisection.
pub fn lap_invert<S: Real>(f: &Map1D<S>, lap: (S, S), v: S) -> Result<S> {
    let (a, b) = lap;
    let (fa, fb) = (f.eval(a)?, f.eval(b)?);
    let (vlo, vhi) = if fa <= fb { (fa, fb) } else { (fb, fa) };
    let slack = S::bisect_tol() * S::lit(16.0);
    if v < vlo - slack || v > vhi + slack {
        return Err(Error::Range(format!("{:?} outside f(lap) = [{:?}, {:?}]", v, vlo, vhi)));
    }
    Ok(invert_monotone(|t| f.at(t), a, b, fa <= fb, v))
}

/// Bisection for `g(t) = v` on [a, b] where `g` is monotone with the given
/// orientation. Values outside the range snap to the nearer end.
pub(crate) fn invert_monotone<S: Real>(g: impl Fn(S) -> S, a: S, b: S, increasing: bool, v: S) -> S {
    let two = S::lit(2.0);
    let (mut lo, mut hi) = (a, b);
    for _ in 0..220 {
        if hi - lo <= S::bisect_tol() * hi.abs().max(S::lit(1e-3)) {
            break;
        }
        let mid = (lo + hi) / two;
        let below = g(mid) < v;
        if below == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / two
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn warsaw_values() {
        assert_eq!(warsaw_f(1.0).unwrap(), 1.0);
        assert!((warsaw_f(0.5f64).unwrap() - (0.25 * 2f64.sin() + 0.5)).abs() < 1e-15);
        let v = 0.5 * (0.3 * (1.0f64 / 0.7).sin() + 1.0);
        assert!((warsaw_f(0.7f64).unwrap() - v).abs() < 1e-12);
        assert!(warsaw_f(0.0f64).is_err());
    }

    #[test]
    fn depth_values() {
        assert_eq!(depth_f(1.0f64).unwrap(), 0.0);
        assert!((depth_f(0.5f64).unwrap() - 0.625).abs() < 1e-15);
        assert!((depth_f(0.4f64).unwrap() - 0.8).abs() < 1e-15);
        assert!(depth_f(-0.1f64).is_err());
    }

    #[test]
    fn laps_alternate() {
        let f = Map1D::depth(0.05f64);
        let laps = f.monotone_laps();
        assert!(laps.len() > 10);
        assert_eq!(laps.last().unwrap().1, 1.0);
        for w in laps.windows(2) {
            assert_eq!(w[0].1, w[1].0);
        }
    }
}
