use crate::error::{domain, Result};
use crate::scalar::Field;

/// The tent family on the intervals `I_n = [a_n, a_{n+1}]`, `n` in Z.
///
/// Endpoints: `a_0 = 1/4`, `a_{-k} = 1/(k+2)^2` and `a_k = 1 - 1/(k+1)^2`
/// for `k >= 1`, so `|I_0| = 1/2` and `I_{-k}` mirrors `I_k`. On `I_n` the
/// tent rises from 0 to 1 and back with slope `2/|I_n|`.
#[derive(Clone, Debug)]
pub struct TentFamily<F> {
    n_max: i64,
    _field: std::marker::PhantomData<F>,
}

/// Tent indices kept by default: every interval at least 1/400 long.
pub const DEFAULT_FLOOR: f64 = 1.0 / 400.0;

impl<F: Field> TentFamily<F> {
    /// Materializes `I_n` for `|n| <= n_max`.
    pub fn new(n_max: i64) -> Self {
        Self { n_max, _field: std::marker::PhantomData }
    }

    /// Keeps exactly the intervals no shorter than `floor`.
    pub fn with_floor(floor: f64) -> Self {
        let mut n = 0;
        while interval_len_f64(n + 1) >= floor {
            n += 1;
        }
        Self::new(n)
    }

    pub fn n_max(&self) -> i64 {
        self.n_max
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> {
        -self.n_max..=self.n_max
    }

    fn int(v: i64) -> F {
        F::from_i64(v).expect("small integer")
    }

    pub fn a(&self, k: i64) -> F {
        match k {
            0 => F::one() / Self::int(4),
            k if k < 0 => F::one() / Self::int((2 - k) * (2 - k)),
            k => F::one() - F::one() / Self::int((k + 1) * (k + 1)),
        }
    }

    pub fn interval(&self, n: i64) -> (F, F) {
        (self.a(n), self.a(n + 1))
    }

    pub fn slope(&self, n: i64) -> F {
        let (a, b) = self.interval(n);
        Self::int(2) / (b - a)
    }

    pub fn peak(&self, n: i64) -> F {
        let (a, b) = self.interval(n);
        (a + b) / Self::int(2)
    }

    /// `T_n(x)` for `x` in `I_n`.
    pub fn eval(&self, n: i64, x: F) -> Result<F> {
        let (a, b) = self.interval(n);
        if x < a || x > b {
            return domain(format!("x = {:?} outside I_{n}", x));
        }
        let lam = self.slope(n);
        let left = x.clone() - a;
        let right = b - x;
        Ok(lam * if left < right { left } else { right })
    }

    /// The two points of `I_n` that `T_n` sends to `v`, rising one first.
    pub fn preimages(&self, n: i64, v: F) -> [F; 2] {
        let (a, b) = self.interval(n);
        let step = v / self.slope(n);
        [a + step.clone(), b - step]
    }
}

fn interval_len_f64(k: i64) -> f64 {
    let k = k.abs() as f64;
    if k == 0.0 {
        0.5
    } else {
        1.0 / ((k + 1.0) * (k + 1.0)) - 1.0 / ((k + 2.0) * (k + 2.0))
    }
}

/// Index `n` with `x` in `I_n`, for `x` in (0, 1). Endpoints report the
/// interval to their right. Within 1e-18 of 0 or 1 the index saturates
/// near 1e9.
pub fn tent_index(x: f64) -> i64 {
    let x = x.clamp(1e-18, 1.0 - 1e-16);
    if (0.25..0.75).contains(&x) {
        return 0;
    }
    if x < 0.25 {
        // a_{-k} = 1/(k+2)^2 <= x < a_{-k+1}
        let mut k = ((1.0 / x.sqrt()).floor() as i64 - 2).max(1);
        while 1.0 / (((k + 2) * (k + 2)) as f64) > x {
            k += 1;
        }
        while k > 1 && 1.0 / (((k + 1) * (k + 1)) as f64) <= x {
            k -= 1;
        }
        -k
    } else {
        // a_k = 1 - 1/(k+1)^2 <= x < a_{k+1}
        let r = 1.0 - x;
        let mut k = ((1.0 / r.sqrt()).floor() as i64 - 1).max(1);
        while 1.0 / (((k + 1) * (k + 1)) as f64) < r {
            k -= 1;
        }
        while 1.0 / (((k + 2) * (k + 2)) as f64) >= r {
            k += 1;
        }
        k.max(1)
    }
}

/// Tent value at any `x` in (0, 1), using every interval of the family;
/// 0 at and beyond the ends.
pub fn tent_value(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    let n = tent_index(x);
    let fam = TentFamily::<f64>::new(n.abs() + 1);
    let (a, b) = fam.interval(n);
    fam.slope(n) * (x - a).min(b - x).max(0.0)
}

/// Membership of `(x, y)` in the closure of the tent graphs, within `tol`.
pub fn tent_relation_tol(x: f64, y: f64, tol: f64) -> Result<bool> {
    if !(-tol..=1.0 + tol).contains(&x) || !(-tol..=1.0 + tol).contains(&y) {
        return domain(format!("({x}, {y}) outside the unit square"));
    }
    if x <= tol || x >= 1.0 - tol {
        return Ok(true);
    }
    let n = tent_index(x);
    let fam = TentFamily::<f64>::new(n.abs() + 1);
    let (a, b) = fam.interval(n);
    let lam = fam.slope(n);
    // Near an endpoint both neighbouring tents are small; compare against
    // the local graph value allowing for slope times position error.
    let v = lam * (x - a).min(b - x).max(0.0);
    Ok((y - v).abs() <= tol * (1.0 + lam))
}

pub fn tent_relation(x: f64, y: f64) -> Result<bool> {
    tent_relation_tol(x, y, 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    #[test]
    fn repaired_endpoints() {
        let f = TentFamily::<f64>::new(8);
        assert_eq!(f.interval(0), (0.25, 0.75));
        assert_eq!(f.a(1), 0.75);
        assert_eq!(f.a(-1), 1.0 / 9.0);
        assert_eq!(f.slope(0), 4.0);
        for n in 1..8 {
            assert!(f.slope(n) > 4.0 && f.slope(-n) > 4.0);
            let (a, b) = f.interval(n);
            let (c, d) = f.interval(-n);
            assert!((1.0 - b - c).abs() < 1e-15 && (1.0 - a - d).abs() < 1e-15);
        }
    }

    #[test]
    fn exact_family_agrees_with_float() {
        let q = TentFamily::<BigRational>::new(7);
        let f = TentFamily::<f64>::new(7);
        for n in -7..=7 {
            let (a, b) = q.interval(n);
            let r = |v: &BigRational| v.numer().to_string().parse::<f64>().unwrap() / v.denom().to_string().parse::<f64>().unwrap();
            assert!((r(&a) - f.a(n)).abs() < 1e-15 && (r(&b) - f.a(n + 1)).abs() < 1e-15);
            let peak = q.peak(n);
            assert_eq!(q.eval(n, peak).unwrap(), BigRational::from_integer(BigInt::from(1)));
        }
    }

    #[test]
    fn floor_keeps_seven_each_side() {
        assert_eq!(TentFamily::<f64>::with_floor(DEFAULT_FLOOR).n_max(), 7);
    }

    #[test]
    fn index_lookup() {
        let f = TentFamily::<f64>::new(40);
        for n in -39..=39 {
            let (a, b) = f.interval(n);
            assert_eq!(tent_index((a + b) / 2.0), n);
            assert_eq!(tent_index(a + 1e-12), n);
        }
    }

    #[test]
    fn relation_examples() {
        assert!(tent_relation(0.0, 0.37).unwrap());
        assert!(tent_relation(1.0, 0.9).unwrap());
        assert!(tent_relation(0.5, 1.0).unwrap());
        assert!(!tent_relation(0.5, 0.9).unwrap());
        assert!(tent_relation(0.25, 0.0).unwrap());
        assert!(tent_relation(0.375, 0.5).unwrap());
        assert!(tent_relation(1.2, 0.0).is_err());
    }
}
