//! Multiindices: finite multisets of non-negative delays.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sorted multiset of delays. The empty multiindex is `e`.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(mut elems: Vec<u32>) -> Self {
        elems.sort_unstable();
        MultiIndex(elems)
    }

    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn single(d: u32) -> Self {
        MultiIndex(vec![d])
    }

    pub fn elems(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min_delay(&self) -> Option<u32> {
        self.0.first().copied()
    }

    pub fn max_delay(&self) -> Option<u32> {
        self.0.last().copied()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&d| d as u64).sum()
    }

    pub fn count(&self, d: u32) -> usize {
        self.0.iter().filter(|&&x| x == d).count()
    }

    /// `a ⊕ b`.
    pub fn concat(&self, other: &MultiIndex) -> MultiIndex {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            if a[i] <= b[j] {
                out.push(a[i]);
                i += 1;
            } else {
                out.push(b[j]);
                j += 1;
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        MultiIndex(out)
    }

    /// `a ⊖ b`, the multiset difference.
    pub fn subtract(&self, other: &MultiIndex) -> Result<MultiIndex> {
        let mut rest = self.0.clone();
        for d in &other.0 {
            match rest.iter().position(|x| x == d) {
                Some(p) => {
                    rest.remove(p);
                }
                None => {
                    return Err(Error::NotASubindex {
                        sub: other.to_string(),
                        of: self.to_string(),
                    })
                }
            }
        }
        Ok(MultiIndex(rest))
    }

    /// Every element shifted by `phi`.
    pub fn pointwise_add(&self, phi: i64) -> Result<MultiIndex> {
        if let Some(m) = self.min_delay() {
            if m as i64 + phi < 0 {
                return Err(Error::NegativeDelay {
                    index: self.to_string(),
                    shift: phi,
                });
            }
        }
        Ok(MultiIndex(
            self.0.iter().map(|&d| (d as i64 + phi) as u32).collect(),
        ))
    }

    /// Shift by a non-negative amount; never fails.
    pub fn shifted(&self, s: u32) -> MultiIndex {
        MultiIndex(self.0.iter().map(|&d| d + s).collect())
    }

    /// All distinct sub-multisets of size `k`.
    pub fn k_subindices(&self, k: usize) -> BTreeSet<MultiIndex> {
        let mut out = BTreeSet::new();
        if k > self.len() {
            return out;
        }
        let groups = self.groups();
        let mut pick = vec![0usize; groups.len()];
        fn rec(
            g: usize,
            left: usize,
            groups: &[(u32, usize)],
            pick: &mut Vec<usize>,
            out: &mut BTreeSet<MultiIndex>,
        ) {
            if g == groups.len() {
                if left == 0 {
                    let mut v = Vec::new();
                    for (i, &(d, _)) in groups.iter().enumerate() {
                        v.extend(std::iter::repeat_n(d, pick[i]));
                    }
                    out.insert(MultiIndex(v));
                }
                return;
            }
            for c in 0..=groups[g].1.min(left) {
                pick[g] = c;
                rec(g + 1, left - c, groups, pick, out);
            }
            pick[g] = 0;
        }
        rec(0, k, &groups, &mut pick, &mut out);
        out
    }

    /// Distinct values with their multiplicities, ascending.
    pub fn groups(&self) -> Vec<(u32, usize)> {
        let mut g: Vec<(u32, usize)> = Vec::new();
        for &d in &self.0 {
            match g.last_mut() {
                Some((v, c)) if *v == d => *c += 1,
                _ => g.push((d, 1)),
            }
        }
        g
    }
}

impl Ord for MultiIndex {
    /// Shorter is smaller; for equal lengths the right-most nonzero entry
    /// of `other - self` decides.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.len().cmp(&other.len()) {
            Ordering::Equal => {}
            o => return o,
        }
        for (a, b) in self.0.iter().rev().zip(other.0.iter().rev()) {
            match a.cmp(b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        write!(f, "(")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<&[u32]> for MultiIndex {
    fn from(v: &[u32]) -> Self {
        MultiIndex::new(v.to_vec())
    }
}

impl<const N: usize> From<[u32; N]> for MultiIndex {
    fn from(v: [u32; N]) -> Self {
        MultiIndex::new(v.to_vec())
    }
}
