use super::maps::{depth_f_unchecked, Map1D};
use crate::error::{domain, Error, Result};
use crate::scalar::Real;

/// Local maxima `z` and minima `y` of the depth map, indexed from 1.
///
/// `y(1) = 1` by convention and `y(n+1) < z(n) < y(n)`.
#[derive(Clone, Debug)]
pub struct ExtremaTable<S> {
    z: Vec<S>,
    y: Vec<S>,
    fz: Vec<S>,
    fy: Vec<S>,
}

impl<S: Real> ExtremaTable<S> {
    /// Number of maxima stored; minima go one index further.
    pub fn count(&self) -> usize {
        self.z.len()
    }

    pub fn z(&self, i: usize) -> S {
        self.z[i - 1]
    }

    pub fn y(&self, i: usize) -> S {
        self.y[i - 1]
    }

    pub fn fz(&self, i: usize) -> S {
        self.fz[i - 1]
    }

    pub fn fy(&self, i: usize) -> S {
        self.fy[i - 1]
    }

    /// `[y(i+1), z(i)]`, the lap on which `f` rises to its i-th maximum.
    pub fn p0(&self, i: usize) -> (S, S) {
        (self.y(i + 1), self.z(i))
    }

    /// Rows `(index, y, z)` for CSV export.
    pub fn rows(&self) -> Vec<(usize, f64, f64)> {
        (1..=self.count()).map(|i| (i, self.y(i).as_f64(), self.z(i).as_f64())).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("index,y,z\n");
        for (i, y, z) in self.rows() {
            s.push_str(&format!("{i},{y},{z}\n"));
        }
        s
    }
}

/// The first `count` maxima of `f` below its right end, and the minima
/// that bracket them.
pub fn find_extrema<S: Real>(f: &Map1D<S>, count: usize) -> Result<ExtremaTable<S>> {
    if count == 0 {
        return domain("find_extrema needs count >= 1");
    }
    let crit = f.critical_points(2 * count);
    if crit.len() < 2 * count {
        return Err(Error::Resolution(format!(
            "only {} extrema of {} resolvable above t = {:?}",
            crit.len(),
            f.name(),
            f.domain().0
        )));
    }
    let (_, hi) = f.domain();
    let mut z = Vec::with_capacity(count);
    let mut y = vec![hi];
    for (k, &(t, is_max)) in crit.iter().enumerate() {
        if is_max != (k % 2 == 0) {
            return Err(Error::Resolution(format!("extrema of {} do not alternate at t = {:?}", f.name(), t)));
        }
        if is_max { z.push(t) } else { y.push(t) }
    }
    let fz = z.iter().map(|&t| f.at(t)).collect();
    let fy = y.iter().map(|&t| f.at(t)).collect();
    Ok(ExtremaTable { z, y, fz, fy })
}

/// Extrema of the depth map itself, scanned above a floor low enough for
/// `count` oscillations.
pub fn depth_extrema<S: Real>(count: usize) -> Result<ExtremaTable<S>> {
    let u = 2.0 * count as f64 + 4.0;
    find_extrema(&Map1D::depth(S::lit(1.0 / u)), count)
}

/// `f_i`: the depth map on [y(i+1), 1], and the chord through the origin below.
pub fn truncated_f<S: Real>(table: &ExtremaTable<S>, i: usize, t: S) -> Result<S> {
    if i == 0 || i > table.count() {
        return domain(format!("truncation index {i} outside 1..={}", table.count()));
    }
    if !(t >= S::zero() && t <= S::one()) {
        return domain(format!("truncated_f needs t in [0,1], got {:?}", t));
    }
    Ok(truncated_unchecked(table, i, t))
}

pub(crate) fn truncated_unchecked<S: Real>(table: &ExtremaTable<S>, i: usize, t: S) -> S {
    let knot = table.y(i + 1);
    if t >= knot {
        depth_f_unchecked(t)
    } else {
        table.fy(i + 1).quot(knot) * t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_extrema_are_where_the_formula_puts_them() {
        let t = depth_extrema::<f64>(4).unwrap();
        assert_eq!(t.y(1), 1.0);
        // sin(pi/t) peaks near t = 2/5 and bottoms out near t = 2/7,
        // shifted slightly by the drift term.
        assert!((t.z(1) - 0.4).abs() < 0.01, "{}", t.z(1));
        assert!((t.y(2) - 2.0 / 7.0).abs() < 0.01, "{}", t.y(2));
        for n in 1..=4 {
            assert!(t.y(n + 1) < t.z(n) && t.z(n) < t.y(n));
        }
    }

    #[test]
    fn too_many_extrema_is_a_resolution_error() {
        let f = Map1D::depth(0.1f64);
        assert!(matches!(find_extrema(&f, 50), Err(Error::Resolution(_))));
    }
}
