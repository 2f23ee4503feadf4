use std::collections::HashMap;
use std::fmt;

use crate::error::{domain, Result};

/// A nonincreasing sequence `i_0 >= i_1 >= ... >= i_n` of positive indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSeq(Vec<usize>);

impl IndexSeq {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return domain("index sequence is empty");
        }
        if indices.contains(&0) {
            return domain("indices start at 1");
        }
        if indices.windows(2).any(|w| w[1] > w[0]) {
            return domain(format!("{indices:?} is not nonincreasing"));
        }
        Ok(Self(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    /// `n`, the level of `P^n` this sequence indexes.
    pub fn level(&self) -> usize {
        self.0.len() - 1
    }

    pub fn head(&self) -> usize {
        self.0[0]
    }

    /// Drops `i_0`.
    pub fn tail(&self) -> Option<IndexSeq> {
        (self.0.len() > 1).then(|| IndexSeq(self.0[1..].to_vec()))
    }

    /// Drops `i_n`.
    pub fn parent(&self) -> Option<IndexSeq> {
        (self.0.len() > 1).then(|| IndexSeq(self.0[..self.0.len() - 1].to_vec()))
    }

    /// Every sequence with `i_0 <= i_max` and length `level + 1`, in
    /// lexicographic order.
    pub fn all(i_max: usize, level: usize) -> Vec<IndexSeq> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(level + 1);
        fn rec(cap: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<IndexSeq>) {
            if left == 0 {
                out.push(IndexSeq(cur.clone()));
                return;
            }
            for i in 1..=cap {
                cur.push(i);
                rec(i, left - 1, cur, out);
                cur.pop();
            }
        }
        rec(i_max, level + 1, &mut cur, &mut out);
        out
    }
}

impl fmt::Debug for IndexSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{:?}", self.0)
    }
}

/// Nested parameter intervals `P^n_seq`, keyed by index sequence.
#[derive(Clone, Debug)]
pub struct LapTable<S> {
    pub(crate) entries: HashMap<IndexSeq, (S, S)>,
}

impl<S> Default for LapTable<S> {
    fn default() -> Self {
        Self { entries: HashMap::new() }
    }
}

impl<S: Copy> LapTable<S> {
    pub fn get(&self, seq: &IndexSeq) -> Option<(S, S)> {
        self.entries.get(seq).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&IndexSeq, &(S, S))> {
        self.entries.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(IndexSeq::new(vec![5, 3, 3, 1]).is_ok());
        assert!(IndexSeq::new(vec![2, 3]).is_err());
        assert!(IndexSeq::new(vec![]).is_err());
        assert!(IndexSeq::new(vec![1, 0]).is_err());
    }

    #[test]
    fn enumeration_counts_multisets() {
        // nonincreasing sequences of length k over 1..=m number C(m+k-1, k)
        assert_eq!(IndexSeq::all(12, 0).len(), 12);
        assert_eq!(IndexSeq::all(12, 1).len(), 78);
        assert_eq!(IndexSeq::all(12, 4).len(), 4368);
        assert!(IndexSeq::all(4, 2).iter().all(|s| IndexSeq::new(s.indices().to_vec()).is_ok()));
    }
}
