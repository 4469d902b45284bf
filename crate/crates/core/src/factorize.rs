//! Formal δεL-factorization: `A = Σ c_k δ_{i_k} ε_{j_k} ∗ [L_k, M_k] + R`
//! with monic parametric linear factors and a remainder of zero terms.

use serde_json::{json, Value};

use crate::depoly::{Coeff, DePoly, Kind, LinearPoly};
use crate::error::{Error, Result};
use crate::operator::DeOp;
use crate::parampoly::{ParamId, ParamPoly, RuleSet};
use crate::rational::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TermOrigin {
    /// Created by a subroutine pass.
    Subroutine,
    /// `δ_0 ∗ [A_δl]`, the output-linear part.
    DeltaLinear,
    /// `ε_0 ∗ [A_εl]`, the input-linear part.
    EpsLinear,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorTerm {
    pub coeff: ParamPoly,
    pub op: DeOp,
    pub l: LinearPoly<ParamPoly>,
    pub m: LinearPoly<ParamPoly>,
    pub origin: TermOrigin,
    /// Subroutine pass that created the term; 0 for linear parts.
    pub pass: u32,
    /// The maximum term this pass eliminated.
    pub top: DeOp,
}

impl FactorTerm {
    pub fn expand(&self) -> DePoly<ParamPoly> {
        self.op.star_linear(&self.l, &self.m).scale(&self.coeff)
    }

    /// The factor that matters for `kind`, if the operator has such a part.
    pub fn factor(&self, kind: Kind) -> Option<&LinearPoly<ParamPoly>> {
        match self.origin {
            TermOrigin::DeltaLinear => (kind == Kind::Delta).then_some(&self.l),
            TermOrigin::EpsLinear => (kind == Kind::Eps).then_some(&self.m),
            TermOrigin::Subroutine => match kind {
                Kind::Delta => (!self.op.d.is_empty()).then_some(&self.l),
                Kind::Eps => (!self.op.e.is_empty()).then_some(&self.m),
            },
        }
    }

    pub fn substitute(&self, u: &RuleSet) -> FactorTerm {
        FactorTerm {
            coeff: self.coeff.substitute(u),
            op: self.op.clone(),
            l: self.l.substitute(u),
            m: self.m.substitute(u),
            origin: self.origin,
            pass: self.pass,
            top: self.top.clone(),
        }
    }

    pub fn render(&self) -> String {
        let (neg, mag) = self.coeff.render_parts();
        let mut s = String::new();
        if neg {
            s.push('-');
        }
        if let Some(m) = mag {
            s.push_str(&m);
            s.push(' ');
        }
        s.push_str(&self.op.render());
        s.push_str(" * ");
        s.push_str(&self.bracket());
        s
    }

    fn bracket(&self) -> String {
        match (self.op.d.is_empty(), self.op.e.is_empty()) {
            (false, true) => format!("({})", self.l.render()),
            (true, false) => format!("({})", self.m.render()),
            _ => format!("[{}, {}]", self.l.render(), self.m.render()),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "coeff": self.coeff.render(),
            "op": self.op.render(),
            "L": self.l.render(),
            "M": self.m.render(),
            "origin": match self.origin {
                TermOrigin::Subroutine => "subroutine",
                TermOrigin::DeltaLinear => "output-linear",
                TermOrigin::EpsLinear => "input-linear",
            },
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub terms: Vec<FactorTerm>,
    pub remainder: DePoly<ParamPoly>,
    pub source: DePoly<ParamPoly>,
}

impl Factorization {
    /// `Σ c_k op_k ∗ [L_k, M_k] + R`.
    pub fn reconstruct(&self) -> DePoly<ParamPoly> {
        let mut r = self.remainder.clone();
        for t in &self.terms {
            r.add_assign(&t.expand());
        }
        r
    }

    pub fn params(&self) -> std::collections::BTreeSet<ParamId> {
        let mut s = std::collections::BTreeSet::new();
        for t in &self.terms {
            s.extend(t.coeff.vars());
            for c in t.l.coeffs().values().chain(t.m.coeffs().values()) {
                s.extend(c.vars());
            }
        }
        for c in self.remainder.terms().values() {
            s.extend(c.vars());
        }
        s
    }

    pub fn subroutine_terms(&self) -> impl Iterator<Item = &FactorTerm> {
        self.terms
            .iter()
            .filter(|t| t.origin == TermOrigin::Subroutine)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, t) in self.terms.iter().enumerate() {
            let r = t.render();
            if k == 0 {
                s.push_str(&r);
            } else if let Some(rest) = r.strip_prefix('-') {
                s.push_str(" - ");
                s.push_str(rest);
            } else {
                s.push_str(" + ");
                s.push_str(&r);
            }
        }
        if !self.remainder.is_zero() || self.terms.is_empty() {
            if !s.is_empty() {
                s.push_str(" + ");
            }
            s.push_str(&format!("({})", self.remainder.render()));
        }
        s
    }

    pub fn to_json(&self) -> Value {
        json!({
            "source": self.source.render(),
            "terms": self.terms.iter().map(|t| t.to_json()).collect::<Vec<_>>(),
            "remainder": self.remainder.render(),
            "formal": self.render(),
            "parameters": self.params().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        })
    }
}

fn monic_parametric(kind: Kind, pass: u32, top: u32) -> LinearPoly<ParamPoly> {
    let mut p = LinearPoly::zero(kind);
    for d in 0..top {
        let id = match kind {
            Kind::Delta => ParamId::w(pass, d),
            Kind::Eps => ParamId::s(pass, d),
        };
        p.add_coeff(d, ParamPoly::var(id));
    }
    p.add_coeff(top, ParamPoly::constant(Q::from_integer(1.into())));
    p
}

/// Repeatedly removes the maximum non-zero term; passes are numbered from
/// `first_pass`.
pub fn fdel_subroutine(a: &DePoly<ParamPoly>, first_pass: u32) -> Result<Factorization> {
    if let Some(op) = a.terms().keys().find(|op| op.len() < 2) {
        return Err(Error::InputHasLinearTerms(op.render()));
    }
    let mut rem = a.clone();
    let mut terms = Vec::new();
    let mut pass = first_pass;
    let mut prev: Option<DeOp> = None;
    while let Some((top, c)) = rem.max_nonzero_term() {
        let (top, c) = (top.clone(), c.clone());
        if let Some(p) = &prev {
            if top >= *p {
                return Err(Error::NonTerminating {
                    previous: p.render(),
                    current: top.render(),
                });
            }
        }
        let i1 = top.d.min_delay();
        let j1 = top.e.min_delay();
        if i1.is_none_or(|v| v == 0) && j1.is_none_or(|v| v == 0) {
            return Err(Error::Internal(format!(
                "maximum term {} is a zero term",
                top.render()
            )));
        }
        let l = match i1 {
            Some(i1) => monic_parametric(Kind::Delta, pass, i1),
            None => LinearPoly::identity(Kind::Delta),
        };
        let m = match j1 {
            Some(j1) => monic_parametric(Kind::Eps, pass, j1),
            None => LinearPoly::identity(Kind::Eps),
        };
        let op = top.normalized();
        let t = FactorTerm {
            coeff: c,
            op,
            l,
            m,
            origin: TermOrigin::Subroutine,
            pass,
            top: top.clone(),
        };
        rem.sub_assign(&t.expand());
        terms.push(t);
        prev = Some(top);
        pass += 1;
    }
    Ok(Factorization {
        terms,
        remainder: rem,
        source: a.clone(),
    })
}

/// Factorizes the nonlinear part and appends the linear parts as
/// `δ_0 ∗ [A_δl]` and `ε_0 ∗ [A_εl]` when they are nonzero.
pub fn fdel_algorithm(a: &DePoly<Q>) -> Result<Factorization> {
    let ap = a.to_param();
    let (ld, le, nl) = ap.decompose_linear();
    let mut f = fdel_subroutine(&nl, 1)?;
    if !ld.is_zero() {
        f.terms.push(FactorTerm {
            coeff: ParamPoly::constant(Q::from_integer(1.into())),
            op: DeOp::delta([0]),
            l: ld,
            m: LinearPoly::identity(Kind::Eps),
            origin: TermOrigin::DeltaLinear,
            pass: 0,
            top: DeOp::delta([0]),
        });
    }
    if !le.is_zero() {
        f.terms.push(FactorTerm {
            coeff: ParamPoly::constant(Q::from_integer(1.into())),
            op: DeOp::eps([0]),
            l: LinearPoly::identity(Kind::Delta),
            m: le,
            origin: TermOrigin::EpsLinear,
            pass: 0,
            top: DeOp::eps([0]),
        });
    }
    f.source = ap;
    Ok(f)
}

/// Substitutes `u` everywhere; unbound parameters stay symbolic.
pub fn evaluate(f: &Factorization, u: &RuleSet) -> Factorization {
    Factorization {
        terms: f.terms.iter().map(|t| t.substitute(u)).collect(),
        remainder: f.remainder.substitute(u),
        source: f.source.clone(),
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
    fn all_zero_terms() {
        let a: DePoly<Q> = [(op(&[0, 1], &[]), q(3)), (op(&[0], &[0]), q(1))]
            .into_iter()
            .collect();
        let f = fdel_algorithm(&a).unwrap();
        assert!(f.terms.is_empty());
        assert_eq!(f.remainder, a.to_param());
    }

    #[test]
    fn purely_linear() {
        let a: DePoly<Q> = [(op(&[0], &[]), q(2)), (op(&[], &[1]), q(-1))]
            .into_iter()
            .collect();
        let f = fdel_algorithm(&a).unwrap();
        assert_eq!(f.terms.len(), 2);
        assert!(f.remainder.is_zero());
        assert_eq!(f.reconstruct(), a.to_param());
    }

    #[test]
    fn rejects_linear_input_to_subroutine() {
        let a: DePoly<Q> = [(op(&[1], &[]), q(1))].into_iter().collect();
        assert!(matches!(
            fdel_subroutine(&a.to_param(), 1),
            Err(Error::InputHasLinearTerms(_))
        ));
    }

    #[test]
    fn pure_eps_uses_identity_output_factor() {
        let a: DePoly<Q> = [(op(&[], &[1, 2]), q(1))].into_iter().collect();
        let f = fdel_algorithm(&a).unwrap();
        assert_eq!(f.terms[0].l, LinearPoly::identity(Kind::Delta));
        assert_eq!(f.terms[0].m.render(), "s_1_0 e0 + e1");
        assert_eq!(f.reconstruct(), f.source);
    }
}
