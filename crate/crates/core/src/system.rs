//! Causal nonlinear systems `A y(t) = B u(t) + C[y(t), u(t)]`.

use num_traits::Zero;

use crate::depoly::{DePoly, Kind};
use crate::error::{Error, Result};
use crate::linearize::LinearSystem;
use crate::rational::Q;

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteSystem {
    /// Output-only terms.
    pub a: DePoly<Q>,
    /// Input-only terms.
    pub b: DePoly<Q>,
    /// Cross terms, each with both parts non-empty.
    pub c: DePoly<Q>,
    /// `y(0), …, y(k-1)`.
    pub init: Vec<Q>,
}

impl DiscreteSystem {
    pub fn new(a: DePoly<Q>, b: DePoly<Q>, c: DePoly<Q>, init: Vec<Q>) -> Self {
        DiscreteSystem { a, b, c, init }
    }

    /// `A - B - C`, everything moved to the left.
    pub fn underline(&self) -> DePoly<Q> {
        self.a.sub(&self.b).sub(&self.c)
    }

    pub fn has_cross_terms(&self) -> bool {
        !self.c.is_zero()
    }

    /// Lowest output delay of `A`: the equation determines `y(t - alpha)`.
    pub fn alpha(&self) -> u32 {
        self.a.min_delay_of(Kind::Delta).unwrap_or(0)
    }

    /// Number of initial values the recursion needs.
    pub fn order(&self) -> usize {
        let f = self.underline();
        let maxd = f.max_delay_of(Kind::Delta).unwrap_or(0);
        (maxd - self.alpha().min(maxd)) as usize
    }

    /// Empty iff the system is well-formed, causal and proper.
    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.a.is_zero() {
            v.push("A is zero: the output does not appear".to_string());
        }
        if !self.a.is_pure(Kind::Delta) {
            v.push("A contains input delays".to_string());
        }
        if !self.b.is_pure(Kind::Eps) {
            v.push("B contains output delays".to_string());
        }
        if self.c.terms().keys().any(|op| !op.is_cross()) {
            v.push("C contains terms that are not cross-products".to_string());
        }
        if self
            .a
            .terms()
            .keys()
            .chain(self.b.terms().keys())
            .any(|op| op.is_identity())
        {
            v.push("constant term".to_string());
        }
        if let Some(da) = self.a.min_delay() {
            let (al, _, _) = self.a.decompose_linear();
            if let Some(dl) = al.min_delay() {
                if dl != da {
                    v.push(format!("d(A_l) = {dl} differs from d(A) = {da}"));
                }
            }
            if let Some(db) = self.b.min_delay() {
                if da >= db {
                    v.push(format!("causality: d(A) = {da} is not below d(B) = {db}"));
                }
            }
            if let Some(dc) = self.c.min_delay() {
                if da >= dc {
                    v.push(format!("causality: d(A) = {da} is not below d(C) = {dc}"));
                }
            }
            if !self.a.is_proper() {
                v.push(format!(
                    "A is not proper: delay {da} must occur only once per term"
                ));
            }
        }
        let k = self.order();
        if self.init.len() != k {
            v.push(format!(
                "expected {k} initial values, got {}",
                self.init.len()
            ));
        }
        v
    }

    pub fn check(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidSystem(v))
        }
    }

    pub fn is_linear(&self) -> bool {
        self.c.is_zero()
            && self.a.terms().keys().all(|op| op.is_linear())
            && self.b.terms().keys().all(|op| op.is_linear())
    }

    pub fn to_linear(&self) -> Result<LinearSystem> {
        if !self.is_linear() {
            return Err(Error::NotLinear(self.render()));
        }
        let (l, _, _) = self.a.decompose_linear();
        let (_, m, _) = self.b.decompose_linear();
        LinearSystem::new(l, m)
    }

    /// Operator syntax, parseable back.
    pub fn render(&self) -> String {
        let rhs = self.b.add(&self.c);
        let mut s = format!("{} = {}", self.a.render(), rhs.render());
        if !self.init.is_empty() {
            let vals: Vec<String> = self.init.iter().map(|q| q.to_string()).collect();
            s.push_str(&format!("\ninit: {}", vals.join(", ")));
        }
        s
    }

    /// Time-domain syntax, e.g. `2*y(t) + y(t-1) = u(t-1)`.
    pub fn render_time(&self) -> String {
        format!(
            "{} = {}",
            render_time_poly(&self.a),
            render_time_poly(&self.b.add(&self.c))
        )
    }
}

fn time_factor(sym: char, d: u32, power: usize) -> String {
    let base = if d == 0 {
        format!("{sym}(t)")
    } else {
        format!("{sym}(t-{d})")
    };
    if power == 1 {
        base
    } else {
        format!("{base}^{power}")
    }
}

pub fn render_time_poly(p: &DePoly<Q>) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (k, (op, c)) in p.terms().iter().enumerate() {
        let neg = c < &Q::zero();
        let a = if neg { -c.clone() } else { c.clone() };
        if k == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        let mut fs: Vec<String> = Vec::new();
        for (v, n) in op.d.groups() {
            fs.push(time_factor('y', v, n));
        }
        for (v, n) in op.e.groups() {
            fs.push(time_factor('u', v, n));
        }
        let one = a == Q::from_integer(1.into());
        if !one || fs.is_empty() {
            fs.insert(0, a.to_string());
        }
        s.push_str(&fs.join("*"));
    }
    s
}
