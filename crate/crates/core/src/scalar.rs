use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive, Num};
use twofloat::TwoFloat;

/// Floating-point scalar used by the metric and curve code.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Send + Sync + 'static {
    /// `sin(pi * x)` with the argument reduced exactly modulo 2 first.
    fn sin_pi(self) -> Self;

    /// Width at which bisection on this type stops making progress.
    fn bisect_tol() -> Self;

    /// Converts an `f64` constant exactly (or to nearest for `f32`).
    fn lit(x: f64) -> Self;

    /// Division correctly rounded to the working precision.
    fn quot(self, rhs: Self) -> Self {
        self / rhs
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// Reduces `x` to `s` in [0, 1/2] with `sin(pi x) = sign * sin(pi s)`.
fn reduce_half<S: Real>(x: S) -> (S, S) {
    let two = S::lit(2.0);
    let r = x - two * (x / two).floor();
    let (mut s, sign) = if r >= S::one() { (r - S::one(), -S::one()) } else { (r, S::one()) };
    if s > S::lit(0.5) {
        s = S::one() - s;
    }
    (s, sign)
}

macro_rules! native_real {
    ($t:ty, $tol:expr) => {
        impl Real for $t {
            fn sin_pi(self) -> Self {
                let (s, sign) = reduce_half(self);
                if s <= 0.25 {
                    sign * (<$t>::PI() * s).sin()
                } else {
                    sign * (<$t>::PI() * (0.5 - s)).cos()
                }
            }

            fn bisect_tol() -> Self {
                $tol
            }

            fn lit(x: f64) -> Self {
                x as $t
            }
        }
    };
}

native_real!(f32, 1e-6);
native_real!(f64, 1e-13);

/// Taylor sums for |x| <= pi/4, accurate to double-double precision.
fn dd_sin_small(x: TwoFloat) -> TwoFloat {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 1.0;
    while term.hi().abs() > 1e-34 {
        term = -term * x2 / ((k + 1.0) * (k + 2.0));
        sum += term;
        k += 2.0;
    }
    sum
}

fn dd_cos_small(x: TwoFloat) -> TwoFloat {
    let x2 = x * x;
    let mut term = TwoFloat::from(1.0);
    let mut sum = term;
    let mut k = 0.0;
    while term.hi().abs() > 1e-34 {
        term = -term * x2 / ((k + 1.0) * (k + 2.0));
        sum += term;
        k += 2.0;
    }
    sum
}

impl Real for TwoFloat {
    fn sin_pi(self) -> Self {
        let (s, sign) = reduce_half(self);
        let pi = TwoFloat::PI();
        if s <= TwoFloat::from(0.25) {
            sign * dd_sin_small(pi * s)
        } else {
            sign * dd_cos_small(pi * (TwoFloat::from(0.5) - s))
        }
    }

    fn bisect_tol() -> Self {
        TwoFloat::from(1e-29)
    }

    // twofloat's own quotient drops the low word of `1 - b*(1/b)`, so
    // refine it with one Newton step on the remainder.
    fn quot(self, rhs: Self) -> Self {
        let q = self / rhs;
        let r = self - q * rhs;
        q + r / rhs.hi()
    }

    // The num-traits default for `from_f64` goes through `i64`.
    fn lit(x: f64) -> Self {
        TwoFloat::from(x)
    }
}

/// Exact or floating field used by the tent-map family.
pub trait Field: Num + Clone + PartialOrd + FromPrimitive + Debug {}

impl<T: Num + Clone + PartialOrd + FromPrimitive + Debug> Field for T {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sin_pi_matches_std_on_small_arguments() {
        for k in 0..200 {
            let x = -3.0 + 0.0371 * k as f64;
            assert!((x.sin_pi() - (std::f64::consts::PI * x).sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn sin_pi_is_exact_at_integers_and_half_integers() {
        assert_eq!(7.0f64.sin_pi(), 0.0);
        assert_eq!(2.5f64.sin_pi(), 1.0);
        assert_eq!(3.5f64.sin_pi(), -1.0);
    }

    #[test]
    fn double_double_sin_pi_agrees_with_f64_to_f64_precision() {
        for k in 1..300 {
            let x = 0.37 * k as f64 + 0.013;
            let dd = TwoFloat::from(x).sin_pi();
            assert!((dd.hi() - x.sin_pi()).abs() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn double_double_quotient_is_accurate() {
        for b in [0.037, 3.0, 0.7, 1.0 / 3.0, 123.456] {
            let b = TwoFloat::from(b);
            let q = TwoFloat::from(1.0).quot(b);
            let r = q * b - TwoFloat::from(1.0);
            assert!(r.hi().abs() < 1e-30, "b = {b:?}, residual {r:?}");
        }
    }

    #[test]
    fn literals_keep_fractions() {
        assert_eq!(TwoFloat::lit(0.3).hi(), 0.3);
        assert_eq!(f32::lit(0.5), 0.5);
    }

    #[test]
    fn double_double_sin_pi_satisfies_pythagoras() {
        for k in 1..50 {
            let x = TwoFloat::from(0.1234567 * k as f64) / TwoFloat::from(3.0);
            let s = x.sin_pi();
            let c = (x + TwoFloat::from(0.5)).sin_pi();
            let r = s * s + c * c - TwoFloat::from(1.0);
            assert!(r.hi().abs() < 1e-30, "residual {:?}", r);
        }
    }
}
