//! Polynomials over ℚ in the factorization parameters `w_{λ,d}`, `s_{λ,d}`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{parse_q, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParamKind {
    /// Coefficient of an output factor `L_λ`.
    W,
    /// Coefficient of an input factor `M_λ`.
    S,
    /// Unknown coefficient introduced by the solver.
    Aux,
}

/// `w_{λ,d}`, `s_{λ,d}` or a solver unknown `g_d` / `h_d` (`iteration` 0 / 1).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamId {
    pub kind: ParamKind,
    pub iteration: u32,
    pub delay: u32,
}

impl ParamId {
    pub fn w(iteration: u32, delay: u32) -> Self {
        ParamId {
            kind: ParamKind::W,
            iteration,
            delay,
        }
    }

    pub fn s(iteration: u32, delay: u32) -> Self {
        ParamId {
            kind: ParamKind::S,
            iteration,
            delay,
        }
    }

    pub fn aux(slot: u32, delay: u32) -> Self {
        ParamId {
            kind: ParamKind::Aux,
            iteration: slot,
            delay,
        }
    }
}

impl fmt::Display for ParamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ParamKind::W => write!(f, "w_{}_{}", self.iteration, self.delay),
            ParamKind::S => write!(f, "s_{}_{}", self.iteration, self.delay),
            ParamKind::Aux => {
                let c = if self.iteration == 0 { 'g' } else { 'h' };
                write!(f, "{c}_{}", self.delay)
            }
        }
    }
}

impl fmt::Debug for ParamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ParamId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::RuleSet(format!("bad parameter name `{s}`"));
        let parts: Vec<&str> = s.trim().split('_').collect();
        let num = |p: &str| p.parse::<u32>().map_err(|_| bad());
        match parts.as_slice() {
            ["w", i, d] => Ok(ParamId::w(num(i)?, num(d)?)),
            ["s", i, d] => Ok(ParamId::s(num(i)?, num(d)?)),
            ["g", d] => Ok(ParamId::aux(0, num(d)?)),
            ["h", d] => Ok(ParamId::aux(1, num(d)?)),
            _ => Err(bad()),
        }
    }
}

/// A monomial is a sorted multiset of parameters.
pub type Monomial = Vec<ParamId>;

#[derive(Clone, PartialEq, Eq, Default)]
pub struct ParamPoly {
    terms: BTreeMap<Monomial, Q>,
}

impl ParamPoly {
    pub fn zero() -> Self {
        ParamPoly::default()
    }

    pub fn constant(c: Q) -> Self {
        let mut p = ParamPoly::default();
        if !c.is_zero() {
            p.terms.insert(Vec::new(), c);
        }
        p
    }

    pub fn var(id: ParamId) -> Self {
        let mut p = ParamPoly::default();
        p.terms.insert(vec![id], Q::one());
        p
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_empty())
    }

    pub fn constant_value(&self) -> Option<Q> {
        if self.is_zero() {
            return Some(Q::zero());
        }
        if self.is_constant() {
            return self.terms.get(&Vec::new()).cloned();
        }
        None
    }

    pub fn vars(&self) -> BTreeSet<ParamId> {
        self.terms.keys().flatten().copied().collect()
    }

    pub fn total_degree(&self) -> usize {
        self.terms.keys().map(|m| m.len()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: ParamId) -> usize {
        self.terms
            .keys()
            .map(|m| m.iter().filter(|&&x| x == v).count())
            .max()
            .unwrap_or(0)
    }

    /// Coefficients of `p` viewed as a polynomial in `v`; index = power.
    pub fn coeffs_in(&self, v: ParamId) -> Vec<ParamPoly> {
        let mut out = vec![ParamPoly::zero(); self.degree_in(v) + 1];
        for (m, c) in &self.terms {
            let k = m.iter().filter(|&&x| x == v).count();
            let rest: Monomial = m.iter().copied().filter(|&x| x != v).collect();
            out[k].add_term(rest, c.clone());
        }
        out
    }

    /// Rational coefficients when `p` involves at most the variable `v`.
    pub fn univariate(&self, v: ParamId) -> Option<Vec<Q>> {
        let cs = self.coeffs_in(v);
        cs.iter().map(|c| c.constant_value()).collect()
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, o: &ParamPoly) -> ParamPoly {
        let mut r = self.clone();
        r.add_assign(o);
        r
    }

    pub fn add_assign(&mut self, o: &ParamPoly) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn sub(&self, o: &ParamPoly) -> ParamPoly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), -c.clone());
        }
        r
    }

    pub fn neg(&self) -> ParamPoly {
        ParamPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, k: &Q) -> ParamPoly {
        if k.is_zero() {
            return ParamPoly::zero();
        }
        ParamPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, o: &ParamPoly) -> ParamPoly {
        let mut r = ParamPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let mut m = Vec::with_capacity(m1.len() + m2.len());
                m.extend_from_slice(m1);
                m.extend_from_slice(m2);
                m.sort_unstable();
                r.add_term(m, c1 * c2);
            }
        }
        r
    }

    pub fn pow(&self, n: usize) -> ParamPoly {
        let mut r = ParamPoly::constant(Q::one());
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }

    /// Replace every bound parameter by its value.
    pub fn substitute(&self, rules: &RuleSet) -> ParamPoly {
        let mut r = ParamPoly::zero();
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            let mut rest = Vec::new();
            for v in m {
                match rules.get(v) {
                    Some(x) => coef *= x,
                    None => rest.push(*v),
                }
                if coef.is_zero() {
                    break;
                }
            }
            r.add_term(rest, coef);
        }
        r
    }

    /// Replace parameters by polynomials.
    pub fn substitute_polys(&self, map: &BTreeMap<ParamId, ParamPoly>) -> ParamPoly {
        if !self.terms.keys().flatten().any(|v| map.contains_key(v)) {
            return self.clone();
        }
        let mut r = ParamPoly::zero();
        for (m, c) in &self.terms {
            let mut t = ParamPoly::constant(c.clone());
            let mut rest = Vec::new();
            for v in m {
                match map.get(v) {
                    Some(p) => t = t.mul(p),
                    None => rest.push(*v),
                }
            }
            if !rest.is_empty() {
                let mut mono = ParamPoly::zero();
                mono.terms.insert(rest, Q::one());
                t = t.mul(&mono);
            }
            r.add_assign(&t);
        }
        r
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut keys: Vec<&Monomial> = self.terms.keys().collect();
        keys.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let mut s = String::new();
        for (k, m) in keys.into_iter().enumerate() {
            let c = &self.terms[m];
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let a = c.abs();
            let body = render_monomial(m);
            if m.is_empty() {
                s.push_str(&a.to_string());
            } else if a.is_one() {
                s.push_str(&body);
            } else {
                s.push_str(&format!("{a} {body}"));
            }
        }
        s
    }

    /// True when rendering needs parentheses as a multiplier.
    pub fn is_compound(&self) -> bool {
        self.terms.len() > 1
    }
}

fn render_monomial(m: &Monomial) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < m.len() {
        let mut j = i;
        while j < m.len() && m[j] == m[i] {
            j += 1;
        }
        if j - i == 1 {
            parts.push(m[i].to_string());
        } else {
            parts.push(format!("{}^{}", m[i], j - i));
        }
        i = j;
    }
    parts.join(" ")
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl From<Q> for ParamPoly {
    fn from(q: Q) -> Self {
        ParamPoly::constant(q)
    }
}

/// An assignment of rationals to parameters.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct RuleSet {
    pub bindings: BTreeMap<ParamId, Q>,
}

impl RuleSet {
    pub fn new() -> Self {
        RuleSet::default()
    }

    pub fn get(&self, id: &ParamId) -> Option<&Q> {
        self.bindings.get(id)
    }

    pub fn insert(&mut self, id: ParamId, v: Q) {
        self.bindings.insert(id, v);
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Parses `{"w_1_0": "2", "s_2_1": "-1/3"}`; plain JSON integers are accepted too.
    pub fn from_json(text: &str) -> Result<RuleSet> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::RuleSet(e.to_string()))?;
        let obj = v
            .as_object()
            .ok_or_else(|| Error::RuleSet("expected a JSON object".into()))?;
        let mut r = RuleSet::new();
        for (k, val) in obj {
            let id: ParamId = k.parse()?;
            let q = match val {
                serde_json::Value::String(s) => parse_q(s),
                serde_json::Value::Number(n) => n.as_i64().map(crate::rational::q),
                _ => None,
            }
            .ok_or_else(|| Error::RuleSet(format!("bad value for {k}: {val}")))?;
            r.insert(id, q);
        }
        Ok(r)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let m: serde_json::Map<String, serde_json::Value> = self
            .bindings
            .iter()
            .map(|(k, v)| (k.to_string(), serde_json::Value::String(v.to_string())))
            .collect();
        serde_json::Value::Object(m)
    }

    /// Bindings of `other` added; `other` wins on conflicts.
    pub fn merged(&self, other: &RuleSet) -> RuleSet {
        let mut r = self.clone();
        for (k, v) in &other.bindings {
            r.insert(*k, v.clone());
        }
        r
    }
}

impl Serialize for RuleSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RuleSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        RuleSet::from_json(&v.to_string()).map_err(serde::de::Error::custom)
    }
}

impl FromIterator<(ParamId, Q)> for RuleSet {
    fn from_iter<T: IntoIterator<Item = (ParamId, Q)>>(iter: T) -> Self {
        RuleSet {
            bindings: iter.into_iter().collect(),
        }
    }
}
