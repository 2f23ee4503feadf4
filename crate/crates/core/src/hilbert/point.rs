use crate::error::{domain, Result};
use crate::scalar::Real;

/// Coordinates outside [0, 1] by less than this are clamped instead of rejected.
pub const COORD_TOL: f64 = 1e-12;

/// A point of the Hilbert cube truncated to finitely many coordinates.
///
/// Missing trailing coordinates are zero, so points of different length
/// compare by zero padding.
#[derive(Clone, Debug, PartialEq)]
pub struct HPoint<S> {
    coords: Vec<S>,
}

impl<S: Real> HPoint<S> {
    pub fn new(coords: Vec<S>) -> Result<Self> {
        let tol = S::lit(COORD_TOL);
        let mut coords = coords;
        for (k, c) in coords.iter_mut().enumerate() {
            if !(c.is_finite() && *c >= -tol && *c <= S::one() + tol) {
                return domain(format!("coordinate {k} = {:?} outside [0,1]", c));
            }
            *c = c.max(S::zero()).min(S::one());
        }
        Ok(Self { coords })
    }

    pub fn from_f64(coords: &[f64]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| S::lit(c)).collect())
    }

    /// Builds a point from values already known to lie in [0, 1].
    pub(crate) fn raw(coords: Vec<S>) -> Self {
        debug_assert!(coords.iter().all(|c| *c >= S::zero() && *c <= S::one()));
        Self { coords }
    }

    pub fn origin() -> Self {
        Self { coords: Vec::new() }
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coord(&self, k: usize) -> S {
        self.coords.get(k).copied().unwrap_or_else(S::zero)
    }

    /// theta: prepends a zero coordinate.
    pub fn right_shift(&self) -> Self {
        let mut c = Vec::with_capacity(self.coords.len() + 1);
        c.push(S::zero());
        c.extend_from_slice(&self.coords);
        Self { coords: c }
    }

    /// One half of theta: prepends a zero and halves every coordinate.
    pub fn half_shift(&self) -> Self {
        let half = S::lit(0.5);
        let mut c = Vec::with_capacity(self.coords.len() + 1);
        c.push(S::zero());
        c.extend(self.coords.iter().map(|&v| v * half));
        Self { coords: c }
    }

    /// sigma: drops the first coordinate.
    pub fn left_shift(&self) -> Self {
        Self { coords: self.coords.iter().skip(1).copied().collect() }
    }

    pub fn truncate(&self, d: usize) -> Self {
        Self { coords: self.coords.iter().take(d).copied().collect() }
    }

    pub fn padded(&self, d: usize) -> Self {
        let mut c = self.coords.clone();
        if c.len() < d {
            c.resize(d, S::zero());
        }
        Self { coords: c }
    }

    pub fn with_coord(&self, k: usize, v: S) -> Result<Self> {
        let mut c = self.coords.clone();
        if c.len() <= k {
            c.resize(k + 1, S::zero());
        }
        c[k] = v;
        Self::new(c)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c.as_f64()).collect()
    }
}

/// Weighted product metric: coordinate k carries weight 2^-(k+1).
pub fn product_metric<S: Real>(x: &HPoint<S>, y: &HPoint<S>) -> S {
    metric_slices(x.coords(), y.coords())
}

pub(crate) fn metric_slices<S: Real>(x: &[S], y: &[S]) -> S {
    let half = S::lit(0.5);
    let n = x.len().max(y.len());
    let mut w = half;
    let mut sum = S::zero();
    for k in 0..n {
        let a = x.get(k).copied().unwrap_or_else(S::zero);
        let b = y.get(k).copied().unwrap_or_else(S::zero);
        sum = sum + w * (a - b).abs();
        w = w * half;
    }
    sum
}

/// Same summation as [`metric_slices`], abandoned once the partial sum exceeds
/// `bound`. A returned value is bit-identical to the full metric.
pub(crate) fn metric_bounded<S: Real>(x: &[S], y: &[S], bound: S) -> Option<S> {
    let half = S::lit(0.5);
    let n = x.len().max(y.len());
    let mut w = half;
    let mut sum = S::zero();
    for k in 0..n {
        let a = x.get(k).copied().unwrap_or_else(S::zero);
        let b = y.get(k).copied().unwrap_or_else(S::zero);
        sum = sum + w * (a - b).abs();
        if sum > bound {
            return None;
        }
        w = w * half;
    }
    Some(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[f64]) -> HPoint<f64> {
        HPoint::from_f64(c).unwrap()
    }

    #[test]
    fn metric_examples() {
        assert_eq!(product_metric(&p(&[0.3, 0.2]), &p(&[0.3, 0.2])), 0.0);
        assert_eq!(product_metric(&p(&[1.0]), &p(&[])), 0.5);
        assert_eq!(product_metric(&p(&[1.0, 1.0]), &p(&[0.0, 0.0, 0.0])), 0.75);
    }

    #[test]
    fn out_of_range_is_rejected() {
        assert!(HPoint::<f64>::from_f64(&[0.5, 1.1]).is_err());
        assert!(HPoint::<f64>::from_f64(&[-0.01]).is_err());
        assert!(HPoint::<f64>::from_f64(&[f64::NAN]).is_err());
        assert_eq!(p(&[1.0 + 1e-13]).coord(0), 1.0);
    }

    #[test]
    fn shifts() {
        assert_eq!(p(&[1.0]).right_shift().coords(), &[0.0, 1.0]);
        assert_eq!(p(&[1.0, 1.0]).half_shift().coords(), &[0.0, 0.5, 0.5]);
        assert_eq!(p(&[0.3, 0.7]).left_shift().coords(), &[0.7]);
        let z = p(&[0.0, 0.0]).right_shift();
        assert_eq!(product_metric(&z, &HPoint::origin()), 0.0);
    }

    #[test]
    fn bounded_metric_agrees_bitwise() {
        let a = p(&[0.1, 0.9, 0.33, 0.7]);
        let b = p(&[0.6, 0.2, 0.35]);
        let d = product_metric(&a, &b);
        assert_eq!(metric_bounded(a.coords(), b.coords(), d), Some(d));
        assert_eq!(metric_bounded(a.coords(), b.coords(), 0.1), None);
    }
}
