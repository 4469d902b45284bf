//! δε-polynomials over a coefficient ring, linear δ/ε polynomials, the
//! star-product and homogeneous polynomials.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::multiindex::MultiIndex;
use crate::operator::{DeOp, Signal};
use crate::parampoly::ParamPoly;
use crate::rational::{pow, Q};

/// Coefficient rings: ℚ and [`ParamPoly`].
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn nil() -> Self;
    fn unit() -> Self;
    fn from_q(q: Q) -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn plus_assign(&mut self, o: &Self);
    fn times(&self, o: &Self) -> Self;
    fn negate(&self) -> Self;
    /// `(negative, magnitude)`, magnitude `None` when it is exactly 1.
    fn render_parts(&self) -> (bool, Option<String>);
}

impl Coeff for Q {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn from_q(q: Q) -> Self {
        q
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn plus_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self.clone()
    }
    fn render_parts(&self) -> (bool, Option<String>) {
        let a = self.abs();
        (self.is_negative(), (!a.is_one()).then(|| a.to_string()))
    }
}

impl Coeff for ParamPoly {
    fn nil() -> Self {
        ParamPoly::zero()
    }
    fn unit() -> Self {
        ParamPoly::constant(Q::one())
    }
    fn from_q(q: Q) -> Self {
        ParamPoly::constant(q)
    }
    fn is_zero(&self) -> bool {
        ParamPoly::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn plus_assign(&mut self, o: &Self) {
        self.add_assign(o);
    }
    fn times(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn negate(&self) -> Self {
        self.neg()
    }
    fn render_parts(&self) -> (bool, Option<String>) {
        if self.is_compound() {
            return (false, Some(format!("({})", self.render())));
        }
        let Some((m, c)) = self.terms().iter().next() else {
            return (false, Some("0".into()));
        };
        if m.is_empty() {
            return c.render_parts();
        }
        let mut mono = ParamPoly::constant(c.abs());
        for v in m {
            mono = mono.mul(&ParamPoly::var(*v));
        }
        (c.is_negative(), Some(mono.render()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Kind {
    /// Acts on the output `y`.
    Delta,
    /// Acts on the input `u`.
    Eps,
}

impl Kind {
    pub fn symbol(self) -> &'static str {
        match self {
            Kind::Delta => "d",
            Kind::Eps => "e",
        }
    }
}

/// A canonical sparse map `DeOp → C` without zero coefficients.
#[derive(Clone, PartialEq)]
pub struct DePoly<C: Coeff> {
    terms: BTreeMap<DeOp, C>,
}

impl<C: Coeff> Default for DePoly<C> {
    fn default() -> Self {
        DePoly {
            terms: BTreeMap::new(),
        }
    }
}

impl<C: Coeff> DePoly<C> {
    pub fn zero() -> Self {
        DePoly::default()
    }

    pub fn monomial(op: DeOp, c: C) -> Self {
        let mut p = DePoly::zero();
        p.add_term(op, c);
        p
    }

    pub fn terms(&self) -> &BTreeMap<DeOp, C> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, op: &DeOp) -> Option<&C> {
        self.terms.get(op)
    }

    pub fn add_term(&mut self, op: DeOp, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(op) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().plus_assign(&c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, o: &DePoly<C>) -> DePoly<C> {
        let mut r = self.clone();
        r.add_assign(o);
        r
    }

    pub fn add_assign(&mut self, o: &DePoly<C>) {
        for (op, c) in &o.terms {
            self.add_term(op.clone(), c.clone());
        }
    }

    pub fn sub(&self, o: &DePoly<C>) -> DePoly<C> {
        let mut r = self.clone();
        r.sub_assign(o);
        r
    }

    pub fn sub_assign(&mut self, o: &DePoly<C>) {
        for (op, c) in &o.terms {
            self.add_term(op.clone(), c.negate());
        }
    }

    pub fn neg(&self) -> DePoly<C> {
        self.map_coeffs(|c| c.negate())
    }

    pub fn scale(&self, k: &C) -> DePoly<C> {
        let mut r = DePoly::zero();
        for (op, c) in &self.terms {
            r.add_term(op.clone(), c.times(k));
        }
        r
    }

    pub fn map_coeffs<D: Coeff>(&self, mut f: impl FnMut(&C) -> D) -> DePoly<D> {
        let mut r = DePoly::zero();
        for (op, c) in &self.terms {
            r.add_term(op.clone(), f(c));
        }
        r
    }

    /// Bilinear extension of the operator dot-product.
    pub fn dot(&self, o: &DePoly<C>) -> DePoly<C> {
        let mut r = DePoly::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                r.add_term(a.dot(b), ca.times(cb));
            }
        }
        r
    }

    pub fn power(&self, n: usize) -> DePoly<C> {
        let mut r = DePoly::monomial(DeOp::identity(), C::unit());
        for _ in 0..n {
            r = r.dot(self);
        }
        r
    }

    /// Every delay of the given kind increased by `s`.
    pub fn shift_kind(&self, kind: Kind, s: u32) -> DePoly<C> {
        let mut r = DePoly::zero();
        for (op, c) in &self.terms {
            let op = match kind {
                Kind::Delta => DeOp::new(op.d.shifted(s), op.e.clone()),
                Kind::Eps => DeOp::new(op.d.clone(), op.e.shifted(s)),
            };
            r.add_term(op, c.clone());
        }
        r
    }

    /// Every delay of both kinds increased by `s`.
    pub fn shift_all(&self, s: u32) -> DePoly<C> {
        self.shift_kind(Kind::Delta, s).shift_kind(Kind::Eps, s)
    }

    /// `A ∗ [L, M]`: each `δ_i ε_j` becomes `Π L(shifted by i_k) · Π M(shifted by j_l)`.
    /// `l` must be a pure δ-polynomial and `m` a pure ε-polynomial.
    pub fn star(&self, l: &DePoly<C>, m: &DePoly<C>) -> DePoly<C> {
        let mut cache_l: BTreeMap<u32, DePoly<C>> = BTreeMap::new();
        let mut cache_m: BTreeMap<u32, DePoly<C>> = BTreeMap::new();
        let mut r = DePoly::zero();
        for (op, c) in &self.terms {
            let mut t = DePoly::monomial(DeOp::identity(), c.clone());
            for &i in op.d.elems() {
                let f = cache_l
                    .entry(i)
                    .or_insert_with(|| l.shift_kind(Kind::Delta, i));
                t = t.dot(f);
            }
            for &j in op.e.elems() {
                let f = cache_m
                    .entry(j)
                    .or_insert_with(|| m.shift_kind(Kind::Eps, j));
                t = t.dot(f);
            }
            r.add_assign(&t);
        }
        r
    }

    pub fn star_linear(&self, l: &LinearPoly<C>, m: &LinearPoly<C>) -> DePoly<C> {
        self.star(&l.to_depoly(), &m.to_depoly())
    }

    /// `d(A)`, the minimum delay occurring anywhere.
    pub fn min_delay(&self) -> Option<u32> {
        self.terms.keys().filter_map(|op| op.min_delay()).min()
    }

    /// Minimum delay among the parts of one kind.
    pub fn min_delay_of(&self, kind: Kind) -> Option<u32> {
        self.terms
            .keys()
            .filter_map(|op| op.part(kind).min_delay())
            .min()
    }

    pub fn max_delay_of(&self, kind: Kind) -> Option<u32> {
        self.terms
            .keys()
            .filter_map(|op| op.part(kind).max_delay())
            .max()
    }

    /// The largest `deg(i ⊕ j)`.
    pub fn degree(&self) -> u64 {
        self.terms.keys().map(|op| op.degree()).max().unwrap_or(0)
    }

    pub fn max_term(&self) -> Option<(&DeOp, &C)> {
        self.terms.iter().next_back()
    }

    /// The greatest term that is not a zero term.
    pub fn max_nonzero_term(&self) -> Option<(&DeOp, &C)> {
        self.terms.iter().rev().find(|(op, _)| !op.is_zero_term())
    }

    pub fn has_only_zero_terms(&self) -> bool {
        self.terms.keys().all(|op| op.is_zero_term())
    }

    pub fn is_pure(&self, kind: Kind) -> bool {
        self.terms.keys().all(|op| match kind {
            Kind::Delta => op.e.is_empty(),
            Kind::Eps => op.d.is_empty(),
        })
    }

    /// `(A_δl, A_εl, A_nl)`. Constant terms, if any, stay in `A_nl`.
    pub fn decompose_linear(&self) -> (LinearPoly<C>, LinearPoly<C>, DePoly<C>) {
        let mut ld = LinearPoly::zero(Kind::Delta);
        let mut le = LinearPoly::zero(Kind::Eps);
        let mut nl = DePoly::zero();
        for (op, c) in &self.terms {
            if op.is_linear() {
                if let Some(d) = op.d.min_delay() {
                    ld.add_coeff(d, c.clone());
                } else {
                    le.add_coeff(op.e.min_delay().unwrap(), c.clone());
                }
            } else {
                nl.add_term(op.clone(), c.clone());
            }
        }
        (ld, le, nl)
    }

    /// The minimum delay occurs only in δ-parts, and exactly once in every
    /// term that contains it.
    pub fn is_proper(&self) -> bool {
        let Some(alpha) = self.min_delay() else {
            return false;
        };
        self.terms
            .keys()
            .all(|op| op.e.count(alpha) == 0 && op.d.count(alpha) <= 1)
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, (op, c)) in self.terms.iter().rev().enumerate() {
            let (neg, mag) = c.render_parts();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            match (mag, op.is_identity()) {
                (None, true) => s.push('1'),
                (None, false) => s.push_str(&op.render()),
                (Some(m), true) => s.push_str(&m),
                (Some(m), false) => {
                    s.push_str(&m);
                    s.push(' ');
                    s.push_str(&op.render());
                }
            }
        }
        s
    }
}

impl DePoly<Q> {
    pub fn eval(&self, y: &Signal, u: &Signal, t: usize) -> Q {
        let mut acc = Q::zero();
        for (op, c) in &self.terms {
            acc += c * op.eval(y, u, t);
        }
        acc
    }

    pub fn to_param(&self) -> DePoly<ParamPoly> {
        self.map_coeffs(|c| ParamPoly::constant(c.clone()))
    }
}

impl DePoly<ParamPoly> {
    pub fn substitute(&self, rules: &crate::parampoly::RuleSet) -> DePoly<ParamPoly> {
        self.map_coeffs(|c| c.substitute(rules))
    }

    /// Rational coefficients, if every coefficient is constant.
    pub fn to_rational(&self) -> Option<DePoly<Q>> {
        let mut r = DePoly::zero();
        for (op, c) in &self.terms {
            r.add_term(op.clone(), c.constant_value()?);
        }
        Some(r)
    }
}

impl<C: Coeff> fmt::Display for DePoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl<C: Coeff> fmt::Debug for DePoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl<C: Coeff> FromIterator<(DeOp, C)> for DePoly<C> {
    fn from_iter<T: IntoIterator<Item = (DeOp, C)>>(iter: T) -> Self {
        let mut p = DePoly::zero();
        for (op, c) in iter {
            p.add_term(op, c);
        }
        p
    }
}

/// `Σ c_d δ_d` or `Σ c_d ε_d`.
#[derive(Clone, PartialEq)]
pub struct LinearPoly<C: Coeff> {
    pub kind: Kind,
    coeffs: BTreeMap<u32, C>,
}

impl<C: Coeff> LinearPoly<C> {
    pub fn zero(kind: Kind) -> Self {
        LinearPoly {
            kind,
            coeffs: BTreeMap::new(),
        }
    }

    /// `δ_0` or `ε_0`.
    pub fn identity(kind: Kind) -> Self {
        let mut p = LinearPoly::zero(kind);
        p.add_coeff(0, C::unit());
        p
    }

    /// From coefficients listed by ascending delay, starting at 0.
    pub fn from_coeffs(kind: Kind, cs: Vec<C>) -> Self {
        let mut p = LinearPoly::zero(kind);
        for (d, c) in cs.into_iter().enumerate() {
            p.add_coeff(d as u32, c);
        }
        p
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, C> {
        &self.coeffs
    }

    pub fn coeff(&self, d: u32) -> C {
        self.coeffs.get(&d).cloned().unwrap_or_else(C::nil)
    }

    pub fn add_coeff(&mut self, d: u32, c: C) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(d).or_insert_with(C::nil);
        e.plus_assign(&c);
        if e.is_zero() {
            self.coeffs.remove(&d);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest delay with a nonzero coefficient.
    pub fn max_delay(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn min_delay(&self) -> Option<u32> {
        self.coeffs.keys().next().copied()
    }

    pub fn shifted(&self, s: u32) -> LinearPoly<C> {
        LinearPoly {
            kind: self.kind,
            coeffs: self
                .coeffs
                .iter()
                .map(|(d, c)| (d + s, c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, k: &C) -> LinearPoly<C> {
        let mut p = LinearPoly::zero(self.kind);
        for (d, c) in &self.coeffs {
            p.add_coeff(*d, c.times(k));
        }
        p
    }

    /// `self ∘ o`: applying `o` first, then `self`; a convolution of coefficients.
    pub fn compose(&self, o: &LinearPoly<C>) -> LinearPoly<C> {
        let mut p = LinearPoly::zero(self.kind);
        for (a, x) in &self.coeffs {
            for (b, y) in &o.coeffs {
                p.add_coeff(a + b, x.times(y));
            }
        }
        p
    }

    pub fn map_coeffs<D: Coeff>(&self, mut f: impl FnMut(&C) -> D) -> LinearPoly<D> {
        let mut p = LinearPoly::zero(self.kind);
        for (d, c) in &self.coeffs {
            p.add_coeff(*d, f(c));
        }
        p
    }

    pub fn to_depoly(&self) -> DePoly<C> {
        let mut p = DePoly::zero();
        for (d, c) in &self.coeffs {
            let op = match self.kind {
                Kind::Delta => DeOp::delta([*d]),
                Kind::Eps => DeOp::eps([*d]),
            };
            p.add_term(op, c.clone());
        }
        p
    }

    /// Ascending by delay: `2 d0 + d1`, `e1 - 3 e2`.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let sym = self.kind.symbol();
        let mut s = String::new();
        for (k, (d, c)) in self.coeffs.iter().enumerate() {
            let (neg, mag) = c.render_parts();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if let Some(m) = mag {
                s.push_str(&m);
                s.push(' ');
            }
            s.push_str(&format!("{sym}{d}"));
        }
        s
    }
}

impl LinearPoly<Q> {
    /// Univariate image `Σ c_d x^d`, index = power.
    pub fn to_upoly(&self) -> Vec<Q> {
        let n = self.max_delay().map(|d| d as usize + 1).unwrap_or(0);
        (0..n).map(|d| self.coeff(d as u32)).collect()
    }

    pub fn from_upoly(kind: Kind, p: &[Q]) -> Self {
        LinearPoly::from_coeffs(kind, p.to_vec())
    }

    pub fn to_param(&self) -> LinearPoly<ParamPoly> {
        self.map_coeffs(|c| ParamPoly::constant(c.clone()))
    }

    /// `(L s)(t) = Σ c_d s(t-d)`.
    pub fn apply(&self, s: &Signal, t: usize) -> Q {
        let mut acc = Q::zero();
        for (d, c) in &self.coeffs {
            if let Some(v) = s.at(t as i64 - *d as i64) {
                acc += c * v;
            }
        }
        acc
    }
}

impl LinearPoly<ParamPoly> {
    pub fn substitute(&self, rules: &crate::parampoly::RuleSet) -> LinearPoly<ParamPoly> {
        self.map_coeffs(|c| c.substitute(rules))
    }

    pub fn to_rational(&self) -> Option<LinearPoly<Q>> {
        let mut p = LinearPoly::zero(self.kind);
        for (d, c) in &self.coeffs {
            p.add_coeff(*d, c.constant_value()?);
        }
        Some(p)
    }
}

impl<C: Coeff> fmt::Display for LinearPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl<C: Coeff> fmt::Debug for LinearPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// `δ_idx A`: the dot-product of copies of `A` shifted by each entry of `idx`.
pub fn shift_product<C: Coeff>(idx: &MultiIndex, a: &LinearPoly<C>) -> DePoly<C> {
    let mut r = DePoly::monomial(DeOp::identity(), C::unit());
    for &i in idx.elems() {
        r = r.dot(&a.shifted(i).to_depoly());
    }
    r
}

/// `δ_θ ∗ P` for a polynomial `P` that may mix δ and ε terms.
pub fn shift_product_mixed<C: Coeff>(theta: &MultiIndex, p: &DePoly<C>) -> DePoly<C> {
    let mut r = DePoly::monomial(DeOp::identity(), C::unit());
    for &i in theta.elems() {
        r = r.dot(&p.shift_all(i));
    }
    r
}

/// `Â ∗ (λL + μM)` for a pure δ-polynomial `Â`.
pub fn star_combined(hat: &DePoly<Q>, lm: &DePoly<Q>) -> DePoly<Q> {
    let mut r = DePoly::zero();
    for (op, c) in hat.terms() {
        r.add_assign(&shift_product_mixed(&op.d, lm).scale(c));
    }
    r
}

/// Number of position choices in `theta` that select the sub-multiset `i`.
pub fn multiplicity(theta: &MultiIndex, i: &MultiIndex) -> u64 {
    theta
        .groups()
        .into_iter()
        .map(|(v, n)| crate::rational::binomial(n, i.count(v)))
        .product()
}

/// `Σ_φ λ^φ μ^{n-φ} Σ_{i ∈ I_φ(θ)} δ_i ε_{θ⊖i}`, equal pairs merged.
pub fn make_homogeneous(theta: &MultiIndex, lambda: &Q, mu: &Q) -> DePoly<Q> {
    let n = theta.len();
    let mut r = DePoly::zero();
    for phi in 0..=n {
        let w = pow(lambda, phi) * pow(mu, n - phi);
        for i in theta.k_subindices(phi) {
            let j = theta.subtract(&i).expect("sub-multiset");
            let k = Q::from_integer(multiplicity(theta, &i).into());
            r.add_term(DeOp::new(i, j), &w * k);
        }
    }
    r
}

/// A decomposition `T = Σ_ρ a_ρ · homogeneous(θ_ρ, λ, μ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Homogeneous {
    pub groups: Vec<(MultiIndex, Q)>,
    pub lambda: Q,
    pub mu: Q,
}

impl Homogeneous {
    /// `Σ a_ρ δ_{θ_ρ}`.
    pub fn hat(&self) -> DePoly<Q> {
        self.groups
            .iter()
            .map(|(t, a)| (DeOp::delta(t.clone()), a.clone()))
            .collect()
    }

    pub fn expand(&self) -> DePoly<Q> {
        let mut r = DePoly::zero();
        for (t, a) in &self.groups {
            r.add_assign(&make_homogeneous(t, &self.lambda, &self.mu).scale(a));
        }
        r
    }
}

/// Recognizes `T` as a sum of homogeneous polynomials sharing `(λ, μ)`,
/// normalized to `λ = 1` unless `T` is a pure ε-polynomial.
pub fn detect_homogeneous_sum(t: &DePoly<Q>) -> Option<Homogeneous> {
    if t.is_zero() {
        return None;
    }
    let mut groups: BTreeMap<MultiIndex, Vec<(&DeOp, &Q)>> = BTreeMap::new();
    for (op, c) in t.terms() {
        if op.is_identity() {
            return None;
        }
        groups.entry(op.d.concat(&op.e)).or_default().push((op, c));
    }
    let try_verify = |h: Homogeneous| (h.expand() == *t).then_some(h);

    if t.is_pure(Kind::Eps) {
        let h = Homogeneous {
            groups: groups
                .iter()
                .map(|(th, ts)| (th.clone(), ts[0].1.clone()))
                .collect(),
            lambda: Q::zero(),
            mu: Q::one(),
        };
        return try_verify(h);
    }
    let mut a = Vec::new();
    for th in groups.keys() {
        let c = t.coeff(&DeOp::delta(th.clone()))?;
        a.push((th.clone(), c.clone()));
    }
    let mut mu = Q::zero();
    'find: for (th, ts) in &groups {
        let ath = t.coeff(&DeOp::delta(th.clone())).unwrap();
        for (op, c) in ts {
            if op.e.len() == 1 {
                let m = Q::from_integer(multiplicity(th, &op.d).into());
                mu = (*c).clone() / (ath * m);
                break 'find;
            }
        }
    }
    try_verify(Homogeneous {
        groups: a,
        lambda: Q::one(),
        mu,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    fn op(d: &[u32], e: &[u32]) -> DeOp {
        DeOp::new(d.into(), e.into())
    }

    fn poly(ts: &[(i64, &[u32], &[u32])]) -> DePoly<Q> {
        ts.iter().map(|(c, d, e)| (op(d, e), q(*c))).collect()
    }

    fn lin(kind: Kind, cs: &[i64]) -> LinearPoly<Q> {
        LinearPoly::from_coeffs(kind, cs.iter().map(|&c| q(c)).collect())
    }

    #[test]
    fn add_cancels() {
        let a = poly(&[(1, &[1], &[]), (1, &[2], &[])]);
        let b = poly(&[(-1, &[2], &[])]);
        assert_eq!(a.add(&b), poly(&[(1, &[1], &[])]));
        assert_eq!(a.add(&DePoly::zero()), a);
    }

    #[test]
    fn dot_example() {
        let a = poly(&[(2, &[1], &[]), (1, &[2], &[])]);
        let b = poly(&[(2, &[2], &[]), (1, &[3], &[])]);
        let want = poly(&[
            (4, &[1, 2], &[]),
            (2, &[1, 3], &[]),
            (2, &[2, 2], &[]),
            (1, &[2, 3], &[]),
        ]);
        assert_eq!(a.dot(&b), want);
        let one = DePoly::monomial(DeOp::identity(), q(1));
        assert_eq!(a.dot(&one), a);
    }

    #[test]
    fn shift_product_examples() {
        let l = lin(Kind::Delta, &[2, 1]);
        let got = shift_product(&MultiIndex::from([1, 2]), &l);
        let want = l.shifted(1).to_depoly().dot(&l.shifted(2).to_depoly());
        assert_eq!(got, want);
        assert_eq!(shift_product(&MultiIndex::from([0]), &l), l.to_depoly());
        let m = lin(Kind::Eps, &[2, -1]);
        let got = shift_product(&MultiIndex::from([2, 2]), &m);
        assert_eq!(got, m.shifted(2).to_depoly().power(2));
    }

    #[test]
    fn star_linear_example() {
        let l = lin(Kind::Delta, &[2, 1]);
        let m = lin(Kind::Eps, &[2, -1]);
        let got = op(&[1, 2], &[2, 2]).star_linear(&l, &m);
        let want = poly(&[
            (16, &[1, 2], &[2, 2]),
            (-16, &[1, 2], &[2, 3]),
            (4, &[1, 2], &[3, 3]),
            (8, &[2, 2], &[2, 2]),
            (-8, &[2, 2], &[2, 3]),
            (2, &[2, 2], &[3, 3]),
            (8, &[1, 3], &[2, 2]),
            (-8, &[1, 3], &[2, 3]),
            (2, &[1, 3], &[3, 3]),
            (4, &[2, 3], &[2, 2]),
            (-4, &[2, 3], &[2, 3]),
            (1, &[2, 3], &[3, 3]),
        ]);
        assert_eq!(got, want);
        assert_eq!(op(&[0], &[]).star_linear(&l, &m), l.to_depoly());
    }

    #[test]
    fn star_with_nonlinear_bracket() {
        // (2 δ1 ε2 + δ0² ε1 ε2) ∗ [δ1 - 2δ2, ε0² ε1]
        let a = poly(&[(2, &[1], &[2]), (1, &[0, 0], &[1, 2])]);
        let l = poly(&[(1, &[1], &[]), (-2, &[2], &[])]);
        let m = poly(&[(1, &[], &[0, 0, 1])]);
        let got = a.star(&l, &m);
        let first = l
            .shift_kind(Kind::Delta, 1)
            .dot(&m.shift_kind(Kind::Eps, 2))
            .scale(&q(2));
        let second = l
            .power(2)
            .dot(&m.shift_kind(Kind::Eps, 1))
            .dot(&m.shift_kind(Kind::Eps, 2));
        assert_eq!(got, first.add(&second));
        let id_l = lin(Kind::Delta, &[1]).to_depoly();
        let id_m = lin(Kind::Eps, &[1]).to_depoly();
        assert_eq!(a.star(&id_l, &id_m), a);
    }

    #[test]
    fn decompose() {
        let a: DePoly<Q> = [
            (op(&[0], &[]), q(2)),
            (op(&[1], &[]), q(2)),
            (op(&[2], &[]), qr(1, 2)),
            (op(&[1, 2], &[]), q(1)),
            (op(&[], &[1]), q(3)),
        ]
        .into_iter()
        .collect();
        let (ld, le, nl) = a.decompose_linear();
        assert_eq!(ld.render(), "2 d0 + 2 d1 + 1/2 d2");
        assert_eq!(le.render(), "3 e1");
        assert_eq!(nl.render(), "d1 d2");
        assert_eq!(ld.to_depoly().add(&le.to_depoly()).add(&nl), a);
    }

    #[test]
    fn properness() {
        assert!(poly(&[(5, &[1, 1], &[]), (1, &[0, 1], &[])]).is_proper());
        assert!(!poly(&[(1, &[0, 0], &[]), (1, &[1], &[])]).is_proper());
        assert!(!poly(&[(1, &[1], &[]), (1, &[], &[1])]).is_proper());
    }

    #[test]
    fn homogeneous_examples() {
        let h = make_homogeneous(&MultiIndex::from([1, 2]), &q(1), &q(1));
        let want = poly(&[
            (1, &[1, 2], &[]),
            (1, &[1], &[2]),
            (1, &[2], &[1]),
            (1, &[], &[1, 2]),
        ]);
        assert_eq!(h, want);
        let h = make_homogeneous(&MultiIndex::from([0]), &q(1), &q(1));
        assert_eq!(h, poly(&[(1, &[0], &[]), (1, &[], &[0])]));
        let h = make_homogeneous(&MultiIndex::from([1]), &q(2), &q(3));
        assert_eq!(h, poly(&[(2, &[1], &[]), (3, &[], &[1])]));
        // Repeated entries merge with multiplicity.
        let h = make_homogeneous(&MultiIndex::from([1, 1]), &q(1), &q(1));
        assert_eq!(
            h,
            poly(&[(1, &[1, 1], &[]), (2, &[1], &[1]), (1, &[], &[1, 1])])
        );
    }

    #[test]
    fn detect_examples() {
        let one = q(1);
        let t = make_homogeneous(&MultiIndex::from([0]), &one, &one)
            .sub(&make_homogeneous(&MultiIndex::from([1]), &one, &one))
            .add(&make_homogeneous(&MultiIndex::from([1, 2]), &one, &one));
        let h = detect_homogeneous_sum(&t).unwrap();
        assert_eq!(h.lambda, q(1));
        assert_eq!(h.mu, q(1));
        assert_eq!(
            h.groups,
            vec![
                (MultiIndex::from([0]), q(1)),
                (MultiIndex::from([1]), q(-1)),
                (MultiIndex::from([1, 2]), q(1)),
            ]
        );
        assert_eq!(
            h.hat(),
            poly(&[(1, &[0], &[]), (-1, &[1], &[]), (1, &[1, 2], &[])])
        );

        let h = detect_homogeneous_sum(&poly(&[(2, &[1], &[]), (3, &[], &[1])])).unwrap();
        assert_eq!(h.groups, vec![(MultiIndex::from([1]), q(2))]);
        assert_eq!(h.mu, qr(3, 2));

        assert!(detect_homogeneous_sum(&poly(&[(1, &[1], &[2])])).is_none());
    }

    #[test]
    fn rendering() {
        let p = poly(&[(5, &[1, 1], &[]), (1, &[0, 1], &[])]);
        assert_eq!(p.render(), "5 d1^2 + d0 d1");
        assert_eq!(lin(Kind::Eps, &[0, 1, -3]).render(), "e1 - 3 e2");
    }
}
