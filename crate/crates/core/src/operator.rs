//! δε-operators `δ_i ε_j` and causal signals.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::depoly::{Coeff, DePoly, Kind, LinearPoly};
use crate::multiindex::MultiIndex;
use crate::rational::Q;

/// `δ_i ε_j`: the product of `y(t-i_k)` over `i` and `u(t-j_l)` over `j`.
/// Ordered by the δ-part first, then the ε-part.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct DeOp {
    pub d: MultiIndex,
    pub e: MultiIndex,
}

impl DeOp {
    pub fn new(d: MultiIndex, e: MultiIndex) -> Self {
        DeOp { d, e }
    }

    /// `δ_e ε_e`, the constant 1.
    pub fn identity() -> Self {
        DeOp::default()
    }

    pub fn delta(d: impl Into<MultiIndex>) -> Self {
        DeOp::new(d.into(), MultiIndex::empty())
    }

    pub fn eps(e: impl Into<MultiIndex>) -> Self {
        DeOp::new(MultiIndex::empty(), e.into())
    }

    pub fn len(&self) -> usize {
        self.d.len() + self.e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.is_identity()
    }

    pub fn is_identity(&self) -> bool {
        self.d.is_empty() && self.e.is_empty()
    }

    pub fn is_linear(&self) -> bool {
        self.len() == 1
    }

    pub fn is_nonlinear(&self) -> bool {
        self.len() >= 2
    }

    pub fn is_cross(&self) -> bool {
        !self.d.is_empty() && !self.e.is_empty()
    }

    /// Nonlinear and every non-empty part attains delay 0.
    pub fn is_zero_term(&self) -> bool {
        self.is_nonlinear()
            && self.d.min_delay().is_none_or(|m| m == 0)
            && self.e.min_delay().is_none_or(|m| m == 0)
    }

    /// `deg(i ⊕ j)`.
    pub fn degree(&self) -> u64 {
        self.d.degree() + self.e.degree()
    }

    pub fn min_delay(&self) -> Option<u32> {
        match (self.d.min_delay(), self.e.min_delay()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    pub fn part(&self, kind: Kind) -> &MultiIndex {
        match kind {
            Kind::Delta => &self.d,
            Kind::Eps => &self.e,
        }
    }

    /// Both parts shifted down by their own minimum.
    pub fn normalized(&self) -> DeOp {
        let down = |m: &MultiIndex| match m.min_delay() {
            Some(k) => m.pointwise_add(-(k as i64)).expect("shift by own minimum"),
            None => m.clone(),
        };
        DeOp::new(down(&self.d), down(&self.e))
    }

    pub fn dot(&self, other: &DeOp) -> DeOp {
        DeOp::new(self.d.concat(&other.d), self.e.concat(&other.e))
    }

    /// `Π y(t-i_k) Π u(t-j_l)`, using 0 for negative times.
    pub fn eval(&self, y: &Signal, u: &Signal, t: usize) -> Q {
        let mut acc = Q::one();
        for &i in self.d.elems() {
            match y.at(t as i64 - i as i64) {
                Some(v) => acc *= v,
                None => return Q::zero(),
            }
        }
        for &j in self.e.elems() {
            match u.at(t as i64 - j as i64) {
                Some(v) => acc *= v,
                None => return Q::zero(),
            }
        }
        acc
    }

    /// `δ_i ε_j ∗ [L, M]` expanded.
    pub fn star_linear<C: Coeff>(&self, l: &LinearPoly<C>, m: &LinearPoly<C>) -> DePoly<C> {
        let mut out = DePoly::monomial(DeOp::identity(), C::unit());
        for &i in self.d.elems() {
            out = out.dot(&l.shifted(i).to_depoly());
        }
        for &j in self.e.elems() {
            out = out.dot(&m.shifted(j).to_depoly());
        }
        out
    }

    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        for (sym, idx) in [("d", &self.d), ("e", &self.e)] {
            for (v, c) in idx.groups() {
                if c == 1 {
                    parts.push(format!("{sym}{v}"));
                } else {
                    parts.push(format!("{sym}{v}^{c}"));
                }
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(" ")
        }
    }
}

impl fmt::Display for DeOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for DeOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "δ{}ε{}", self.d, self.e)
    }
}

/// A causal sequence: `values[t]` for `t >= 0`, zero before time 0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signal {
    pub values: Vec<Q>,
}

impl Signal {
    pub fn new(values: Vec<Q>) -> Self {
        Signal { values }
    }

    pub fn zeros(n: usize) -> Self {
        Signal {
            values: vec![Q::zero(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `None` means the value is zero because `t < 0`.
    ///
    /// Panics when `t` lies beyond the known samples.
    pub fn at(&self, t: i64) -> Option<&Q> {
        if t < 0 {
            None
        } else {
            Some(&self.values[t as usize])
        }
    }

    pub fn value(&self, t: i64) -> Q {
        self.at(t).cloned().unwrap_or_else(Q::zero)
    }

    pub fn push(&mut self, v: Q) {
        self.values.push(v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn op(d: &[u32], e: &[u32]) -> DeOp {
        DeOp::new(d.into(), e.into())
    }

    #[test]
    fn order_examples() {
        assert!(op(&[1], &[]) < op(&[1, 2], &[]));
        assert!(op(&[1], &[2]) < op(&[1], &[3]));
        assert!(op(&[], &[5]) < op(&[0], &[]));
    }

    #[test]
    fn dot_example() {
        let a = op(&[0, 1], &[1, 1, 2]);
        let b = op(&[0, 0, 1], &[0, 0]);
        assert_eq!(a.dot(&b), op(&[0, 0, 0, 1, 1], &[0, 0, 1, 1, 2]));
        assert_eq!(a.dot(&DeOp::identity()), a);
    }

    #[test]
    fn zero_terms() {
        assert!(op(&[0, 1], &[]).is_zero_term());
        assert!(op(&[0, 0], &[]).is_zero_term());
        assert!(op(&[0], &[0]).is_zero_term());
        assert!(op(&[0], &[0, 3]).is_zero_term());
        assert!(!op(&[0], &[]).is_zero_term());
        assert!(!op(&[0], &[1]).is_zero_term());
        assert!(!op(&[1, 1], &[]).is_zero_term());
    }

    #[test]
    fn eval_examples() {
        let y = Signal::new((1..=6).map(q).collect());
        let u = Signal::new((1..=6).map(|k| q(10 * k)).collect());
        let t = 5;
        let a = op(&[0, 1, 1, 2], &[1, 1, 3, 3, 3]);
        let direct = y.value(5)
            * y.value(4)
            * y.value(4)
            * y.value(3)
            * u.value(4)
            * u.value(4)
            * u.value(2)
            * u.value(2)
            * u.value(2);
        assert_eq!(a.eval(&y, &u, t), direct);
        assert_eq!(DeOp::identity().eval(&y, &u, 0), q(1));
        let b = op(&[0, 0, 1, 2], &[]);
        assert_eq!(b.eval(&y, &u, 5), q(6 * 6 * 5 * 4));
        assert_eq!(op(&[3], &[]).eval(&y, &u, 2), q(0));
    }

    #[test]
    fn render() {
        assert_eq!(op(&[1, 1], &[0, 2]).render(), "d1^2 e0 e2");
        assert_eq!(DeOp::identity().render(), "1");
    }
}
