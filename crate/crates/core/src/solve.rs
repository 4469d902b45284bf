//! Polynomial constraints on the parameters and their solution by
//! successive substitution with rational-root search, plus gcd and exact
//! division of linear polynomials.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::depoly::{DePoly, Kind, LinearPoly};
use crate::error::{Error, Result};
use crate::factorize::{Factorization, TermOrigin};
use crate::parampoly::{ParamId, ParamPoly, RuleSet};
use crate::rational::Q;
use crate::upoly;

/// `poly = 0`, tagged with where it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintEquation {
    pub poly: ParamPoly,
    pub label: String,
}

impl ConstraintEquation {
    pub fn new(poly: ParamPoly, label: impl Into<String>) -> Self {
        ConstraintEquation {
            poly,
            label: label.into(),
        }
    }

    pub fn vars(&self) -> BTreeSet<ParamId> {
        self.poly.vars()
    }

    pub fn is_tautology(&self) -> bool {
        self.poly.is_zero()
    }

    /// A nonzero constant: no rule set can satisfy it.
    pub fn is_contradiction(&self) -> bool {
        !self.poly.is_zero() && self.poly.is_constant()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConstraintSystem {
    pub equations: Vec<ConstraintEquation>,
}

impl ConstraintSystem {
    /// Adds `p = 0` unless it is a tautology.
    pub fn push(&mut self, p: ParamPoly, label: impl Into<String>) {
        if !p.is_zero() {
            self.equations.push(ConstraintEquation::new(p, label));
        }
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn contradiction(&self) -> Option<&ConstraintEquation> {
        self.equations.iter().find(|e| e.is_contradiction())
    }

    pub fn vars(&self) -> BTreeSet<ParamId> {
        self.equations.iter().flat_map(|e| e.vars()).collect()
    }

    /// True when `u` zeroes every equation.
    pub fn satisfied_by(&self, u: &RuleSet) -> bool {
        self.equations
            .iter()
            .all(|e| e.poly.substitute(u).is_zero())
    }
}

/// One equation per remainder coefficient, largest term first.
pub fn remainder_constraints(f: &Factorization) -> ConstraintSystem {
    let mut cs = ConstraintSystem::default();
    for (op, c) in f.remainder.terms().iter().rev() {
        cs.push(
            c.clone(),
            format!("remainder coefficient of {}", op.render()),
        );
    }
    cs
}

/// Bound parameters expressed through the free ones.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Family {
    pub bindings: BTreeMap<ParamId, ParamPoly>,
    pub free: BTreeSet<ParamId>,
}

impl Family {
    pub fn is_ground(&self) -> bool {
        self.free.is_empty() && self.bindings.values().all(|p| p.is_constant())
    }

    pub fn ground(&self) -> Option<RuleSet> {
        if !self.is_ground() {
            return None;
        }
        Some(
            self.bindings
                .iter()
                .map(|(k, v)| (*k, v.constant_value().unwrap()))
                .collect(),
        )
    }

    /// The constant part of the family as a rule set.
    pub fn constant_bindings(&self) -> RuleSet {
        self.bindings
            .iter()
            .filter_map(|(k, v)| v.constant_value().map(|c| (*k, c)))
            .collect()
    }

    /// Binds free parameters and re-evaluates the dependent ones.
    pub fn specialize(&self, u: &RuleSet) -> Family {
        let mut bindings: BTreeMap<ParamId, ParamPoly> = self
            .bindings
            .iter()
            .map(|(k, v)| (*k, v.substitute(u)))
            .collect();
        let mut free = BTreeSet::new();
        for v in &self.free {
            match u.get(v) {
                Some(x) => {
                    bindings.insert(*v, ParamPoly::constant(x.clone()));
                }
                None => {
                    free.insert(*v);
                }
            }
        }
        Family { bindings, free }
    }

    /// `u` lies in the family: it binds every parameter of the family, and
    /// each bound parameter takes the value its expression gives under `u`.
    pub fn contains(&self, u: &RuleSet) -> bool {
        if self.free.iter().any(|v| u.get(v).is_none()) {
            return false;
        }
        self.bindings.iter().all(|(k, expr)| match u.get(k) {
            Some(x) => expr.substitute(u).constant_value().as_ref() == Some(x),
            None => false,
        })
    }

    pub fn to_json(&self) -> Value {
        let b: serde_json::Map<String, Value> = self
            .bindings
            .iter()
            .map(|(k, v)| (k.to_string(), Value::String(v.render())))
            .collect();
        json!({
            "bindings": b,
            "free": self.free.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        })
    }

    fn bind(&mut self, v: ParamId, expr: ParamPoly) {
        let map: BTreeMap<ParamId, ParamPoly> = [(v, expr.clone())].into_iter().collect();
        for e in self.bindings.values_mut() {
            *e = e.substitute_polys(&map);
        }
        self.bindings.insert(v, expr);
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeadBranch {
    pub partial: Family,
    pub equation: ConstraintEquation,
    /// The equation after substituting the branch's bindings.
    pub reduced: ParamPoly,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StuckBranch {
    pub partial: Family,
    pub equations: Vec<ConstraintEquation>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveReport {
    pub solutions: Vec<Family>,
    pub stuck: Vec<StuckBranch>,
    pub dead: Vec<DeadBranch>,
    pub truncated: bool,
}

impl SolveReport {
    pub fn is_unsatisfiable(&self) -> bool {
        self.solutions.is_empty() && self.stuck.is_empty() && !self.truncated
    }

    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        for d in &self.dead {
            out.push(format!(
                "unsatisfiable: {} `{} = 0` reduces to `{} = 0` ({})",
                d.equation.label,
                d.equation.poly.render(),
                d.reduced.render(),
                d.reason
            ));
        }
        for s in &self.stuck {
            let eqs: Vec<String> = s
                .equations
                .iter()
                .map(|e| format!("{} = 0", e.poly.render()))
                .collect();
            out.push(format!("stuck: no tactic applies to {}", eqs.join("; ")));
        }
        if self.truncated {
            out.push("branch limit reached".to_string());
        }
        out
    }
}

struct Branch {
    family: Family,
    // (current polynomial, original equation)
    eqs: Vec<(ParamPoly, usize)>,
}

enum Step {
    Solved,
    Dead(usize, ParamPoly, String),
    Stuck,
    Split(Vec<Branch>),
}

/// Successive substitution. Tactics, in order: an equation in a single
/// unknown branches on its rational roots; an equation linear in some
/// unknown with a constant coefficient eliminates it; an equation whose
/// terms share an unknown `v` splits into `v = 0` and the cofactor.
pub fn solve_successive(cs: &ConstraintSystem, branch_limit: usize) -> SolveReport {
    let limit = branch_limit.max(1);
    let mut report = SolveReport::default();
    let mut stack = vec![Branch {
        family: Family::default(),
        eqs: cs
            .equations
            .iter()
            .enumerate()
            .map(|(k, e)| (e.poly.clone(), k))
            .collect(),
    }];
    let all_vars = cs.vars();
    while let Some(b) = stack.pop() {
        let leaves = report.solutions.len() + report.stuck.len() + report.dead.len();
        if leaves >= limit {
            report.truncated = true;
            break;
        }
        let fam = b.family.clone();
        match step(b) {
            Step::Solved => {
                let mut f = fam;
                f.free = all_vars
                    .iter()
                    .filter(|v| !f.bindings.contains_key(v))
                    .copied()
                    .collect();
                report.solutions.push(f);
            }
            Step::Dead(k, reduced, reason) => report.dead.push(DeadBranch {
                partial: fam,
                equation: cs.equations[k].clone(),
                reduced,
                reason,
            }),
            Step::Stuck => {
                let map = fam.bindings.clone();
                let eqs = cs
                    .equations
                    .iter()
                    .map(|e| {
                        ConstraintEquation::new(e.poly.substitute_polys(&map), e.label.clone())
                    })
                    .filter(|e| !e.is_tautology())
                    .collect();
                report.stuck.push(StuckBranch {
                    partial: fam,
                    equations: eqs,
                });
            }
            Step::Split(bs) => {
                // Reverse so that the first branch is explored first.
                stack.extend(bs.into_iter().rev());
            }
        }
    }
    // Ground solutions inside a more general family add nothing.
    let sols = std::mem::take(&mut report.solutions);
    for (k, s) in sols.iter().enumerate() {
        let subsumed = s.ground().is_some_and(|u| {
            sols.iter()
                .enumerate()
                .any(|(j, t)| j != k && !t.is_ground() && t.contains(&u))
        });
        if !subsumed && !report.solutions.contains(s) {
            report.solutions.push(s.clone());
        }
    }
    report.solutions.sort_by(|a, b| {
        a.constant_bindings()
            .cmp(&b.constant_bindings())
            .then_with(|| a.free.cmp(&b.free))
    });
    report
}

fn substitute_branch(b: &Branch, v: ParamId, expr: ParamPoly) -> Branch {
    let map: BTreeMap<ParamId, ParamPoly> = [(v, expr.clone())].into_iter().collect();
    let mut family = b.family.clone();
    family.bind(v, expr);
    Branch {
        family,
        eqs: b
            .eqs
            .iter()
            .map(|(p, k)| (p.substitute_polys(&map), *k))
            .collect(),
    }
}

fn step(mut b: Branch) -> Step {
    b.eqs.retain(|(p, _)| !p.is_zero());
    if let Some((p, k)) = b.eqs.iter().find(|(p, _)| p.is_constant()) {
        return Step::Dead(*k, p.clone(), "nonzero constant".into());
    }
    if b.eqs.is_empty() {
        return Step::Solved;
    }
    // A single unknown: branch on rational roots.
    if let Some((p, k)) = b.eqs.iter().find(|(p, _)| p.vars().len() == 1) {
        let v = *p.vars().iter().next().unwrap();
        let coeffs = p.univariate(v).expect("univariate");
        let Some(roots) = upoly::rational_roots(&coeffs) else {
            return Step::Stuck;
        };
        if roots.is_empty() {
            return Step::Dead(*k, p.clone(), "no rational root".into());
        }
        let branches = roots
            .into_iter()
            .map(|(r, _)| substitute_branch(&b, v, ParamPoly::constant(r)))
            .collect();
        return Step::Split(branches);
    }
    // Linear in some unknown with a constant coefficient.
    for (p, _) in &b.eqs {
        for v in p.vars() {
            if p.degree_in(v) != 1 {
                continue;
            }
            let cs = p.coeffs_in(v);
            if let Some(c) = cs[1].constant_value() {
                let expr = cs[0].scale(&(-Q::one() / c));
                return Step::Split(vec![substitute_branch(&b, v, expr)]);
            }
        }
    }
    // Every term contains v: v = 0 or p / v = 0.
    for (idx, (p, k)) in b.eqs.iter().enumerate() {
        let common = p
            .terms()
            .keys()
            .map(|m| m.iter().copied().collect::<BTreeSet<_>>())
            .reduce(|a, c| a.intersection(&c).copied().collect())
            .unwrap_or_default();
        if let Some(&v) = common.iter().next() {
            let first = substitute_branch(&b, v, ParamPoly::zero());
            let mut second = Branch {
                family: b.family.clone(),
                eqs: b.eqs.clone(),
            };
            second.eqs[idx] = (divide_by_var(p, v), *k);
            return Step::Split(vec![first, second]);
        }
    }
    Step::Stuck
}

fn divide_by_var(p: &ParamPoly, v: ParamId) -> ParamPoly {
    let cs = p.coeffs_in(v);
    let mut r = ParamPoly::zero();
    let x = ParamPoly::var(v);
    let mut pw = ParamPoly::one_poly();
    for c in cs.iter().skip(1) {
        r.add_assign(&c.mul(&pw));
        pw = pw.mul(&x);
    }
    r
}

impl ParamPoly {
    fn one_poly() -> ParamPoly {
        ParamPoly::constant(Q::one())
    }
}

/// Monic gcd of the univariate images; the identity when coprime.
pub fn linear_gcd(ps: &[LinearPoly<Q>]) -> LinearPoly<Q> {
    let kind = ps.first().map(|p| p.kind).unwrap_or(Kind::Delta);
    let mut g: Vec<Q> = Vec::new();
    for p in ps {
        g = upoly::gcd(&g, &p.to_upoly());
    }
    LinearPoly::from_upoly(kind, &g)
}

/// Exact quotient under the convolution isomorphism.
pub fn linear_divide(num: &LinearPoly<Q>, den: &LinearPoly<Q>) -> Result<LinearPoly<Q>> {
    if den.is_zero() {
        return Err(Error::NotDivisible {
            num: num.render(),
            den: den.render(),
            remainder: "division by zero".into(),
        });
    }
    let (qt, r) = upoly::divrem(&num.to_upoly(), &den.to_upoly());
    if !r.is_empty() {
        return Err(Error::NotDivisible {
            num: num.render(),
            den: den.render(),
            remainder: LinearPoly::from_upoly(num.kind, &r).render(),
        });
    }
    Ok(LinearPoly::from_upoly(num.kind, &qt))
}

/// `Σ c_k op_k ∗ [L_k / L, M_k / M]` for a ground factorization with a
/// vanishing remainder. Terms whose coefficient vanishes are skipped.
pub fn hat_polynomial(
    f: &Factorization,
    l: &LinearPoly<Q>,
    m: &LinearPoly<Q>,
) -> Result<DePoly<Q>> {
    let not_ground = |what: String| Error::Internal(format!("{what} is not ground"));
    if !f.remainder.is_zero() {
        return Err(Error::Internal(format!(
            "remainder {} does not vanish",
            f.remainder.render()
        )));
    }
    let mut out = DePoly::zero();
    for t in &f.terms {
        let c = t
            .coeff
            .constant_value()
            .ok_or_else(|| not_ground(t.coeff.render()))?;
        if c.is_zero() {
            continue;
        }
        let quotient =
            |kind: Kind, p: &LinearPoly<crate::parampoly::ParamPoly>, by: &LinearPoly<Q>| {
                let used = match t.origin {
                    TermOrigin::Subroutine => !t.op.part(kind).is_empty(),
                    TermOrigin::DeltaLinear => kind == Kind::Delta,
                    TermOrigin::EpsLinear => kind == Kind::Eps,
                };
                if !used {
                    return Ok(LinearPoly::identity(kind));
                }
                let p = p.to_rational().ok_or_else(|| not_ground(p.render()))?;
                linear_divide(&p, by)
            };
        let lq = quotient(Kind::Delta, &t.l, l)?;
        let mq = quotient(Kind::Eps, &t.m, m)?;
        out.add_assign(&t.op.star_linear(&lq, &mq).scale(&c));
    }
    Ok(out)
}
