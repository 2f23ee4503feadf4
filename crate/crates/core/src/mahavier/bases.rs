use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::curves::{tent_index, tent_value, TentFamily};
use crate::error::{domain, Result};

/// Range of the tent relation over `[lo, hi]`: the exact image when the
/// interval stays inside (0, 1), the whole of [0, 1] once it reaches a
/// vertical segment.
pub fn tent_image(lo: f64, hi: f64) -> (f64, f64) {
    if lo <= 0.0 || hi >= 1.0 {
        return (0.0, 1.0);
    }
    let (nl, nh) = (tent_index(lo), tent_index(hi));
    let (vl, vh) = (tent_value(lo), tent_value(hi));
    let (mut mn, mut mx) = (vl.min(vh), vl.max(vh));
    if nl != nh {
        mn = 0.0;
    }
    let fam = TentFamily::<f64>::new(nl.abs().max(nh.abs()) + 1);
    let peak_in = |n: i64| (lo..=hi).contains(&fam.peak(n));
    if nh - nl >= 2 || peak_in(nl) || peak_in(nh) {
        mx = 1.0;
    }
    (mn, mx)
}

/// Coordinate boxes of `X_n` over the slab `x_0 in [lo, hi]`: each box is
/// the range of its coordinate, `[0, 1]` past the first one that meets a
/// vertical segment.
pub fn slab_boxes(lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n + 1);
    let mut r = (lo, hi);
    out.push(r);
    for _ in 0..n {
        r = tent_image(r.0, r.1);
        out.push(r);
    }
    out
}

/// Weighted diameter bound of the `X_n` slab over `[lo, hi]`.
pub fn slab_diameter(lo: f64, hi: f64, n: usize) -> f64 {
    slab_boxes(lo, hi, n).iter().enumerate().map(|(k, r)| (r.1 - r.0) * 0.5f64.powi(k as i32 + 1)).sum()
}

/// First coordinate index below `n` whose box touches 0 or 1, i.e. where
/// the slab contains a base of a nondegenerate fiber.
pub fn slab_hit(lo: f64, hi: f64, n: usize) -> Option<usize> {
    slab_boxes(lo, hi, n).iter().take(n).position(|r| r.0 <= 0.0 || r.1 >= 1.0)
}

/// Grid slabs `[k g, (k+1) g]` of [0, 1] whose `X_level` fiber is
/// nondegenerate, reported by slab centre.
pub fn profile_bases(level: usize, grid: f64) -> Result<Vec<f64>> {
    if !(grid > 0.0 && grid <= 1.0) || level == 0 {
        return domain("profile_bases needs level >= 1 and grid in (0, 1]");
    }
    let cells = (1.0 / grid).ceil() as usize;
    Ok((0..cells)
        .filter_map(|k| {
            let lo = k as f64 * grid;
            let hi = ((k + 1) as f64 * grid).min(1.0);
            slab_hit(lo, hi, level).map(|_| 0.5 * (lo + hi))
        })
        .collect())
}

/// Fraction of grid slabs whose `X_level` slab diameter is below `eps`.
pub fn degenerate_fraction(level: usize, grid: f64, eps: f64) -> f64 {
    let cells = (1.0 / grid).ceil() as usize;
    let good = (0..cells)
        .filter(|&k| slab_diameter(k as f64 * grid, ((k + 1) as f64 * grid).min(1.0), level) < eps)
        .count();
    good as f64 / cells as f64
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Scale down big numerators and denominators together.
            let shift = q.denom().bits().max(q.numer().bits()).saturating_sub(1000);
            let n: BigInt = q.numer() >> shift;
            let d: BigInt = q.denom() >> shift;
            n.to_f64().unwrap_or(0.0) / d.to_f64().unwrap_or(1.0)
        }
    }
}

/// Tent indices whose intervals leave no gap wider than `gap` at 0 or 1.
fn index_reach(gap: f64) -> i64 {
    let mut m = 0i64;
    while 1.0 / (((m + 2) * (m + 2)) as f64) > gap {
        m += 1;
    }
    m
}

/// Bases `y` of nondegenerate `psi_level` fibers, as exact rationals:
/// iterated tent preimages of {0, 1}. Preimages are taken through every
/// tent interval and branch needed to leave no gap wider than `gap`.
pub fn tranche_bases_with(level: usize, gap: f64) -> Result<Vec<BigRational>> {
    if level == 0 {
        return domain("tranche levels start at 1");
    }
    if !(gap > 0.0) {
        return domain("gap must be positive");
    }
    Ok(bases_rec(level, gap))
}

fn bases_rec(level: usize, gap: f64) -> Vec<BigRational> {
    if level == 1 || gap >= 1.0 {
        return vec![BigRational::zero(), BigRational::one()];
    }
    let m = index_reach(gap);
    let fam = TentFamily::<BigRational>::new(m + 1);
    let mut out = vec![BigRational::zero(), BigRational::one()];
    for n in -m..=m {
        let lam = fam.slope(n);
        let inner = bases_rec(level - 1, gap * lam.to_f64().unwrap_or(f64::INFINITY));
        for v in &inner {
            let [rise, fall] = fam.preimages(n, v.clone());
            out.push(rise);
            out.push(fall);
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Bases at the level's natural resolution: the largest gap is the
/// predicted `4^-(level-1)`.
pub fn tranche_bases(level: usize) -> Result<Vec<BigRational>> {
    if level == 0 {
        return domain("tranche levels start at 1");
    }
    tranche_bases_with(level, 0.25f64.powi(level as i32 - 1))
}

/// Longest gap between consecutive sorted values, exactly.
pub fn longest_gap(bases: &[BigRational]) -> BigRational {
    bases.windows(2).map(|w| &w[1] - &w[0]).max().unwrap_or_else(BigRational::zero)
}

/// `4^-(level-1)` as a rational.
pub fn predicted_gap(level: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(4).pow(level as u32 - 1))
}

/// Exact tent orbit: `Some(k)` when `T^k(y)` first lands in {0, 1}
/// within `steps` iterations.
pub fn hitting_time(y: &BigRational, steps: usize) -> Option<usize> {
    let zero = BigRational::zero();
    let one = BigRational::one();
    let mut x = y.clone();
    for k in 0..=steps {
        if x == zero || x == one {
            return Some(k);
        }
        if k == steps {
            break;
        }
        let n = locate_exact(&x);
        let fam = TentFamily::<BigRational>::new(n.abs() + 1);
        x = fam.eval(n, x).ok()?;
    }
    None
}

fn locate_exact(x: &BigRational) -> i64 {
    let n = tent_index(rational_to_f64(x));
    let fam = TentFamily::<BigRational>::new(n.abs() + 2);
    // the float lookup can be off by one right at an endpoint
    for c in [n, n - 1, n + 1] {
        let (a, b) = fam.interval(c);
        if &a <= x && x <= &b {
            return c;
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn level_two_bases() {
        let b = tranche_bases(2).unwrap();
        let want = [0, 1, 2, 3, 4].map(|k| BigRational::new(BigInt::from(k), BigInt::from(4)));
        assert_eq!(b, want.to_vec());
        assert_eq!(longest_gap(&b), rat(1) / rat(4));
    }

    #[test]
    fn image_of_a_branch_is_exact() {
        let (lo, hi) = tent_image(0.3, 0.4);
        assert!((lo - 0.2).abs() < 1e-12 && (hi - 0.6).abs() < 1e-12);
        assert_eq!(tent_image(0.45, 0.55).1, 1.0);
        assert_eq!(tent_image(0.7, 0.8).0, 0.0);
        assert_eq!(tent_image(0.0, 0.1), (0.0, 1.0));
    }

    #[test]
    fn hitting_times_of_small_bases() {
        assert_eq!(hitting_time(&rat(0), 3), Some(0));
        assert_eq!(hitting_time(&(rat(1) / rat(2)), 3), Some(1));
        assert_eq!(hitting_time(&(rat(3) / rat(8)), 3), Some(2));
        assert_eq!(hitting_time(&(rat(1) / rat(3)), 6), None);
    }
}
