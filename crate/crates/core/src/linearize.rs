//! Search for linear systems `L y = M u` with the same input/output
//! behaviour as a nonlinear system.
//!
//! Both algorithms factorize, tie the non-vanishing linear factors to a
//! common divisor, solve the remaining coefficient constraints, divide the
//! divisor out and compare the quotients. Every emitted system is checked by
//! exact simulation before it is reported.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::depoly::{detect_homogeneous_sum, star_combined, DePoly, Kind, LinearPoly};
use crate::error::{Error, Result};
use crate::factorize::{evaluate, fdel_algorithm, Factorization, TermOrigin};
use crate::operator::DeOp;
use crate::parampoly::{ParamId, ParamPoly, RuleSet};
use crate::rational::{nth_roots, pow, Q};
use crate::simulate::{certify_equivalence, Certificate};
use crate::solve::{hat_polynomial, linear_gcd, solve_successive, ConstraintSystem, Family};
use crate::system::{render_time_poly, DiscreteSystem};
use crate::upoly;

/// `L y(t) = M u(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSystem {
    pub l: LinearPoly<Q>,
    pub m: LinearPoly<Q>,
}

impl LinearSystem {
    pub fn new(l: LinearPoly<Q>, m: LinearPoly<Q>) -> Result<Self> {
        if l.is_zero() {
            return Err(Error::InvalidSystem(vec!["L is zero".into()]));
        }
        if let (Some(dl), Some(dm)) = (l.min_delay(), m.min_delay()) {
            if dl >= dm {
                return Err(Error::InvalidSystem(vec![format!(
                    "causality: d(L) = {dl} is not below d(M) = {dm}"
                )]));
            }
        }
        Ok(LinearSystem { l, m })
    }

    /// Initial values needed by the recursion.
    pub fn order(&self) -> usize {
        (self.l.max_delay().unwrap_or(0) - self.l.min_delay().unwrap_or(0)) as usize
    }

    /// Common delay removed and the lowest output coefficient made positive.
    pub fn normalized(&self) -> LinearSystem {
        let s = self
            .l
            .min_delay()
            .unwrap_or(0)
            .min(self.m.min_delay().unwrap_or(u32::MAX));
        let down = |p: &LinearPoly<Q>| {
            let mut r = LinearPoly::zero(p.kind);
            for (d, c) in p.coeffs() {
                r.add_coeff(d - s, c.clone());
            }
            r
        };
        let (mut l, mut m) = (down(&self.l), down(&self.m));
        let lead = l.coeff(l.min_delay().unwrap_or(0));
        if lead < Q::zero() {
            l = l.scale(&-Q::one());
            m = m.scale(&-Q::one());
        }
        LinearSystem { l, m }
    }

    /// Equal up to a common nonzero factor.
    pub fn same_up_to_scale(&self, o: &LinearSystem) -> bool {
        let unit = |s: &LinearSystem| {
            let n = s.normalized();
            let lead = n.l.coeff(n.l.min_delay().unwrap_or(0));
            let k = Q::one() / lead;
            (n.l.scale(&k), n.m.scale(&k))
        };
        unit(self) == unit(o)
    }

    pub fn to_system(&self, init: Vec<Q>) -> DiscreteSystem {
        DiscreteSystem::new(self.l.to_depoly(), self.m.to_depoly(), DePoly::zero(), init)
    }

    /// Operator syntax: `2 d0 + d1 = e1 - 3 e2`.
    pub fn render(&self) -> String {
        format!("{} = {}", self.l.render(), self.m.render())
    }

    pub fn render_time(&self) -> String {
        format!(
            "{} = {}",
            render_time_poly(&self.l.to_depoly()),
            render_time_poly(&self.m.to_depoly())
        )
    }

    pub fn to_json(&self) -> Value {
        json!({
            "L": self.l.render(),
            "M": self.m.render(),
            "operator": self.render(),
            "time_domain": self.render_time(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    /// No cross terms: `A` and `B` are handled separately.
    NoCross,
    /// Cross terms present: `A - B - C` is handled as a whole.
    Cross,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::NoCross => "no-cross",
            Algorithm::Cross => "cross",
        }
    }

    pub fn for_system(sys: &DiscreteSystem) -> Algorithm {
        if sys.has_cross_terms() {
            Algorithm::Cross
        } else {
            Algorithm::NoCross
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearizeOptions {
    /// Caps solver leaves and rule-set completions per candidate.
    pub branch_limit: usize,
    pub trials: usize,
    pub horizon: usize,
    pub seed: u64,
}

impl Default for LinearizeOptions {
    fn default() -> Self {
        LinearizeOptions {
            branch_limit: 64,
            trials: 3,
            horizon: 300,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    /// The emitted system, normalized.
    pub system: LinearSystem,
    /// Divisor of the output factors as found.
    pub l: LinearPoly<Q>,
    /// Input-side factor as found: the monic input divisor times `kappa`.
    pub m: LinearPoly<Q>,
    /// `Â`; for the no-cross algorithm `B̂` coincides with it up to `κ`.
    pub hat: DePoly<Q>,
    pub hat_b: Option<DePoly<Q>>,
    /// Factor applied to the monic input divisor.
    pub kappa: Q,
    /// Weights of the homogeneous decomposition relative to `l` and `m`;
    /// always 1 once the input weight is absorbed into `m`.
    pub lambda: Option<Q>,
    pub mu: Option<Q>,
    pub families: Vec<Family>,
    pub rule_sets: Vec<RuleSet>,
    pub certificate: Certificate,
}

impl Solution {
    pub fn to_json(&self) -> Value {
        json!({
            "L": self.system.l.render(),
            "M": self.system.m.render(),
            "system": self.system.to_json(),
            "l_factor": self.l.render(),
            "m_factor": self.m.render(),
            "hat": self.hat.render(),
            "hat_b": self.hat_b.as_ref().map(|h| h.render()),
            "kappa": self.kappa.to_string(),
            "lambda": self.lambda.as_ref().map(|k| k.to_string()),
            "mu": self.mu.as_ref().map(|k| k.to_string()),
            "families": self.families.iter().map(|f| f.to_json()).collect::<Vec<_>>(),
            "rule_sets": self.rule_sets.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
            "certificate": self.certificate.to_json(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearizationReport {
    pub algorithm: Algorithm,
    pub factorizations: Vec<(String, Factorization)>,
    pub solutions: Vec<Solution>,
    pub diagnostics: Vec<String>,
}

impl LinearizationReport {
    fn new(algorithm: Algorithm) -> Self {
        LinearizationReport {
            algorithm,
            factorizations: Vec::new(),
            solutions: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "algorithm": self.algorithm.name(),
            "factorizations": self.factorizations.iter().map(|(n, f)| json!({
                "of": n,
                "factorization": f.to_json(),
            })).collect::<Vec<_>>(),
            "solutions": self.solutions.iter().map(|s| s.to_json()).collect::<Vec<_>>(),
            "diagnostics": self.diagnostics,
        })
    }

    fn finish(self) -> Result<LinearizationReport> {
        if self.solutions.is_empty() {
            Err(Error::MethodFails(Box::new(self)))
        } else {
            Ok(self)
        }
    }

    fn add(&mut self, s: Solution) {
        for old in &mut self.solutions {
            if old.system.same_up_to_scale(&s.system) {
                for f in s.families {
                    if !old.families.contains(&f) {
                        old.families.push(f);
                    }
                }
                for r in s.rule_sets {
                    if !old.rule_sets.contains(&r) {
                        old.rule_sets.push(r);
                    }
                }
                return;
            }
        }
        self.solutions.push(s);
    }
}

/// Dispatches on the presence of cross terms.
pub fn linearize(sys: &DiscreteSystem, opts: &LinearizeOptions) -> Result<LinearizationReport> {
    match Algorithm::for_system(sys) {
        Algorithm::NoCross => linearize_no_cross(sys, opts),
        Algorithm::Cross => linearize_cross(sys, opts),
    }
}

/// The monic divisor every tied factor is set to, as ascending coefficients.
#[derive(Clone, Debug)]
struct Tie {
    kind: Kind,
    g: Vec<ParamPoly>,
}

impl Tie {
    fn ground(kind: Kind, p: &[Q]) -> Tie {
        Tie {
            kind,
            g: p.iter().cloned().map(ParamPoly::constant).collect(),
        }
    }

    fn symbolic(kind: Kind, degree: u32) -> Tie {
        let slot = match kind {
            Kind::Delta => 0,
            Kind::Eps => 1,
        };
        let mut g: Vec<ParamPoly> = (0..degree)
            .map(|d| ParamPoly::var(ParamId::aux(slot, d)))
            .collect();
        g.push(ParamPoly::constant(Q::one()));
        Tie { kind, g }
    }

    fn degree(&self) -> u32 {
        self.g.len() as u32 - 1
    }

    fn render(&self) -> String {
        let p = LinearPoly::from_coeffs(self.kind, self.g.clone());
        p.render()
    }
}

fn param_of(kind: Kind, pass: u32, d: u32) -> ParamId {
    match kind {
        Kind::Delta => ParamId::w(pass, d),
        Kind::Eps => ParamId::s(pass, d),
    }
}

/// Factors of degree at least `deg G` become `x^(deg - deg G) G`; the
/// coefficients of the others are required to vanish.
fn ansatz(f: &Factorization, ties: &[Tie]) -> (BTreeMap<ParamId, ParamPoly>, ConstraintSystem) {
    let mut bind = BTreeMap::new();
    let mut vanish = Vec::new();
    for (k, t) in f.terms.iter().enumerate() {
        if t.origin != TermOrigin::Subroutine {
            continue;
        }
        for tie in ties {
            let Some(p) = t.factor(tie.kind) else {
                continue;
            };
            let deg = p.max_delay().unwrap_or(0);
            let g = tie.degree();
            if deg >= g {
                for d in 0..deg {
                    let v = if d >= deg - g {
                        tie.g[(d - (deg - g)) as usize].clone()
                    } else {
                        ParamPoly::zero()
                    };
                    bind.insert(param_of(tie.kind, t.pass, d), v);
                }
            } else if !vanish.contains(&k) {
                vanish.push(k);
            }
        }
    }
    let mut cs = ConstraintSystem::default();
    for k in vanish {
        cs.push(
            f.terms[k].coeff.substitute_polys(&bind),
            format!("coefficient of term {}", k + 1),
        );
    }
    for (op, c) in f.remainder.terms() {
        cs.push(
            c.substitute_polys(&bind),
            format!("remainder coefficient of {}", op.render()),
        );
    }
    (bind, cs)
}

/// A ground factorization with its divisors and quotient.
#[derive(Clone, Debug, PartialEq)]
struct Ground {
    g: LinearPoly<Q>,
    h: LinearPoly<Q>,
    hat: DePoly<Q>,
    /// Terms with a vanishing coefficient.
    vanished: Vec<usize>,
}

fn ground_side(f: &Factorization, kinds: &[Kind]) -> std::result::Result<Ground, String> {
    for (op, c) in f.remainder.terms() {
        match c.constant_value() {
            Some(v) if v.is_zero() => {}
            Some(_) => {
                return Err(format!(
                    "remainder does not vanish: {}",
                    f.remainder.render()
                ))
            }
            None => {
                return Err(format!(
                    "remainder coefficient of {} is not determined: {}",
                    op.render(),
                    c.render()
                ))
            }
        }
    }
    let mut vanished = Vec::new();
    let mut factors: BTreeMap<Kind, Vec<LinearPoly<Q>>> = BTreeMap::new();
    for (k, t) in f.terms.iter().enumerate() {
        let c = t.coeff.constant_value().ok_or_else(|| {
            format!(
                "coefficient of term {} is not determined: {}",
                k + 1,
                t.coeff.render()
            )
        })?;
        if c.is_zero() {
            vanished.push(k);
            continue;
        }
        for &kind in kinds {
            if let Some(p) = t.factor(kind) {
                let p = p.to_rational().ok_or_else(|| {
                    format!("factor of term {} is not determined: {}", k + 1, p.render())
                })?;
                factors.entry(kind).or_default().push(p);
            }
        }
    }
    let gcd_of = |kind: Kind| match factors.get(&kind) {
        Some(ps) => linear_gcd(ps),
        None => LinearPoly::identity(kind),
    };
    let g = gcd_of(Kind::Delta);
    let h = gcd_of(Kind::Eps);
    let hat = hat_polynomial(f, &g, &h).map_err(|e| e.to_string())?;
    Ok(Ground {
        g,
        h,
        hat,
        vanished,
    })
}

/// Candidate from one side (or the whole of `A - B - C`).
#[derive(Clone, Debug)]
struct Candidate {
    ground: Ground,
    families: Vec<Family>,
    rule_sets: Vec<RuleSet>,
}

/// Parameters left free by `rules`, filled with monic divisors of the found
/// divisor that have the right degree. Each completion is re-checked.
fn completions(
    f: &Factorization,
    kinds: &[Kind],
    rules: &RuleSet,
    target: &Ground,
    limit: usize,
) -> Vec<RuleSet> {
    let fe = evaluate(f, rules);
    let mut slots: Vec<Vec<Vec<(ParamId, Q)>>> = Vec::new();
    for (k, t) in fe.terms.iter().enumerate() {
        if !target.vanished.contains(&k) {
            continue;
        }
        for &kind in kinds {
            let Some(p) = t.factor(kind) else { continue };
            if p.to_rational().is_some() {
                continue;
            }
            let deg = p.max_delay().unwrap_or(0);
            let gcd = match kind {
                Kind::Delta => &target.g,
                Kind::Eps => &target.h,
            };
            let pass = f.terms[k].pass;
            let mut options: Vec<Vec<(ParamId, Q)>> = upoly::monic_divisors(&gcd.to_upoly())
                .unwrap_or_default()
                .into_iter()
                .filter(|dv| dv.len() as u32 == deg + 1)
                .map(|dv| {
                    (0..deg)
                        .map(|d| (param_of(kind, pass, d), dv[d as usize].clone()))
                        .collect()
                })
                .collect();
            if options.is_empty() {
                options.push(
                    (0..deg)
                        .map(|d| (param_of(kind, pass, d), Q::zero()))
                        .collect(),
                );
            }
            slots.push(options);
        }
    }
    let mut out = vec![rules.clone()];
    for options in slots {
        let mut next = Vec::new();
        'outer: for base in &out {
            for opt in &options {
                let mut r = base.clone();
                for (id, v) in opt {
                    r.insert(*id, v.clone());
                }
                next.push(r);
                if next.len() >= limit {
                    break 'outer;
                }
            }
        }
        out = next;
    }
    let params = f.params();
    out.into_iter()
        .filter(|r| params.iter().all(|p| r.get(p).is_some()))
        .filter(|r| ground_side(&evaluate(&fe, r), kinds).as_ref() == Ok(target))
        .collect()
}

fn constant_rules(bind: &BTreeMap<ParamId, ParamPoly>, fam: &Family) -> (Family, RuleSet) {
    let mut full = fam.clone();
    for (id, e) in bind {
        full.bindings.insert(*id, e.substitute_polys(&fam.bindings));
    }
    full.bindings
        .retain(|id, _| id.kind != crate::parampoly::ParamKind::Aux);
    let rules = full.constant_bindings();
    (full, rules)
}

/// Ansatz, solver and completions for every tie choice.
fn search(
    f: &Factorization,
    tie_choices: &[Vec<Tie>],
    kinds: &[Kind],
    label: &str,
    opts: &LinearizeOptions,
    diags: &mut Vec<String>,
) -> Vec<Candidate> {
    let mut out: Vec<Candidate> = Vec::new();
    for ties in tie_choices {
        let what = ties
            .iter()
            .map(|t| t.render())
            .collect::<Vec<_>>()
            .join(", ");
        let (bind, cs) = ansatz(f, ties);
        let rep = solve_successive(&cs, opts.branch_limit);
        for d in rep.diagnostics() {
            diags.push(format!("{label}, divisor {what}: {d}"));
        }
        for fam in &rep.solutions {
            let (full, mut rules) = constant_rules(&bind, fam);
            let mut ground = ground_side(&evaluate(f, &rules), kinds);
            if ground.is_err() && !full.free.is_empty() {
                let mut zeroed = rules.clone();
                for v in &full.free {
                    zeroed.insert(*v, Q::zero());
                }
                let mut fz = Family {
                    bindings: full.bindings.clone(),
                    free: full.free.clone(),
                };
                fz = fz.specialize(&zeroed);
                rules = fz.constant_bindings();
                ground = ground_side(&evaluate(f, &rules), kinds);
            }
            let ground = match ground {
                Ok(g) => g,
                Err(e) => {
                    diags.push(format!("{label}, divisor {what}: {e}"));
                    continue;
                }
            };
            let sets = completions(f, kinds, &rules, &ground, opts.branch_limit);
            match out.iter_mut().find(|c| c.ground == ground) {
                Some(c) => {
                    if !c.families.contains(&full) {
                        c.families.push(full);
                    }
                    for r in sets {
                        if !c.rule_sets.contains(&r) {
                            c.rule_sets.push(r);
                        }
                    }
                }
                None => out.push(Candidate {
                    ground,
                    families: vec![full],
                    rule_sets: sets,
                }),
            }
        }
    }
    out
}

fn max_factor_degree(f: &Factorization, kind: Kind) -> u32 {
    f.subroutine_terms()
        .filter_map(|t| t.factor(kind).and_then(|p| p.max_delay()))
        .max()
        .unwrap_or(0)
}

/// Divisors of the linear part when there is one, else a symbolic divisor of
/// every degree up to the largest factor.
fn tie_options(
    f: &Factorization,
    lin: &LinearPoly<Q>,
    kind: Kind,
    diags: &mut Vec<String>,
) -> Vec<Tie> {
    if !lin.is_zero() {
        match upoly::monic_divisors(&lin.to_upoly()) {
            Some(ds) => return ds.iter().map(|d| Tie::ground(kind, d)).collect(),
            None => diags.push(format!(
                "linear part {} has too many divisors; using a symbolic divisor",
                lin.render()
            )),
        }
    }
    (0..=max_factor_degree(f, kind))
        .map(|g| Tie::symbolic(kind, g))
        .collect()
}

fn to_delta(p: &DePoly<Q>) -> DePoly<Q> {
    p.terms()
        .iter()
        .map(|(op, c)| (DeOp::new(op.d.concat(&op.e), Default::default()), c.clone()))
        .collect()
}

/// All rational `κ` with `b = κ^n a` termwise, `n` the term's degree.
fn kappas(a: &DePoly<Q>, b: &DePoly<Q>) -> Vec<Q> {
    let bd = to_delta(b);
    if a.terms().len() != bd.terms().len() || a.terms().keys().ne(bd.terms().keys()) {
        return Vec::new();
    }
    let Some((op, ca)) = a.terms().iter().next() else {
        return Vec::new();
    };
    let cb = bd.coeff(op).unwrap();
    nth_roots(&(cb / ca), op.len())
        .into_iter()
        .filter(|k| !k.is_zero())
        .filter(|k| {
            a.terms()
                .iter()
                .all(|(op, ca)| bd.coeff(op) == Some(&(ca * pow(k, op.len()))))
        })
        .collect()
}

fn merge_rules(a: &[RuleSet], b: &[RuleSet], limit: usize) -> Vec<RuleSet> {
    let mut out = Vec::new();
    for x in a {
        for y in b {
            if out.len() >= limit {
                return out;
            }
            out.push(x.merged(y));
        }
    }
    out
}

fn merge_families(a: &[Family], b: &[Family]) -> Vec<Family> {
    let mut out = Vec::new();
    for x in a {
        for y in b {
            let mut f = x.clone();
            f.bindings.extend(y.bindings.clone());
            f.free.extend(y.free.iter().copied());
            out.push(f);
        }
    }
    out
}

fn certify(
    sys: &DiscreteSystem,
    ls: &LinearSystem,
    opts: &LinearizeOptions,
) -> Result<Certificate> {
    certify_equivalence(sys, ls, opts.trials, opts.horizon, opts.seed)
}

fn record(
    report: &mut LinearizationReport,
    sys: &DiscreteSystem,
    opts: &LinearizeOptions,
    mut s: Solution,
) -> Result<()> {
    let cert = certify(sys, &s.system, opts)?;
    if cert.passed() {
        s.certificate = cert;
        report.add(s);
    } else {
        let at = cert
            .divergence
            .as_ref()
            .map(|d| format!(" at t = {} (y = {}, y* = {})", d.t, d.y, d.y_star))
            .unwrap_or_default();
        report.diagnostics.push(format!(
            "candidate {} rejected by simulation: {}{at}",
            s.system.render(),
            cert.verdict.as_str()
        ));
    }
    Ok(())
}

fn no_cross_from(
    sys: &DiscreteSystem,
    report: &mut LinearizationReport,
    ca: &[Candidate],
    cb: &[Candidate],
    opts: &LinearizeOptions,
) -> Result<()> {
    let (al, _, _) = sys.a.decompose_linear();
    let (_, bl, _) = sys.b.decompose_linear();
    let waive_proper = !al.is_zero() || !bl.is_zero();
    for a in ca {
        for b in cb {
            let (ha, hb) = (&a.ground.hat, &b.ground.hat);
            if !waive_proper && !ha.is_proper() {
                report
                    .diagnostics
                    .push(format!("quotient {} is not proper", ha.render()));
                continue;
            }
            let ks = kappas(ha, hb);
            if ks.is_empty() {
                report.diagnostics.push(format!(
                    "quotients do not match: {} against {}",
                    ha.render(),
                    hb.render()
                ));
                continue;
            }
            for k in ks {
                let l = a.ground.g.clone();
                let m = b.ground.h.scale(&k);
                let system = match LinearSystem::new(l.clone(), m.clone()) {
                    Ok(s) => s.normalized(),
                    Err(e) => {
                        report.diagnostics.push(e.to_string());
                        continue;
                    }
                };
                let s = Solution {
                    system,
                    l,
                    m,
                    hat: ha.clone(),
                    hat_b: Some(hb.clone()),
                    kappa: k,
                    lambda: None,
                    mu: None,
                    families: merge_families(&a.families, &b.families),
                    rule_sets: merge_rules(&a.rule_sets, &b.rule_sets, opts.branch_limit),
                    certificate: placeholder(opts),
                };
                record(report, sys, opts, s)?;
            }
        }
    }
    Ok(())
}

fn placeholder(opts: &LinearizeOptions) -> Certificate {
    Certificate {
        verdict: crate::simulate::Verdict::Inconclusive,
        trials: 0,
        horizon: opts.horizon,
        seed: opts.seed,
        redraws: 0,
        divergence: None,
        witness: None,
        note: None,
    }
}

fn require_valid(sys: &DiscreteSystem) -> Result<()> {
    sys.check()
}

/// For systems without cross terms.
pub fn linearize_no_cross(
    sys: &DiscreteSystem,
    opts: &LinearizeOptions,
) -> Result<LinearizationReport> {
    require_valid(sys)?;
    if sys.has_cross_terms() {
        return Err(Error::Semantic(
            "the no-cross algorithm needs a system without cross terms".into(),
        ));
    }
    let mut report = LinearizationReport::new(Algorithm::NoCross);
    let fa = fdel_algorithm(&sys.a)?;
    let fb = fdel_algorithm(&sys.b)?;
    let (al, _, _) = sys.a.decompose_linear();
    let (_, bl, _) = sys.b.decompose_linear();
    let ta: Vec<Vec<Tie>> = tie_options(&fa, &al, Kind::Delta, &mut report.diagnostics)
        .into_iter()
        .map(|t| vec![t])
        .collect();
    let tb: Vec<Vec<Tie>> = tie_options(&fb, &bl, Kind::Eps, &mut report.diagnostics)
        .into_iter()
        .map(|t| vec![t])
        .collect();
    let ca = search(&fa, &ta, &[Kind::Delta], "A", opts, &mut report.diagnostics);
    let cb = search(&fb, &tb, &[Kind::Eps], "B", opts, &mut report.diagnostics);
    report.factorizations.push(("A".into(), fa));
    report.factorizations.push(("B".into(), fb));
    no_cross_from(sys, &mut report, &ca, &cb, opts)?;
    report.finish()
}

fn cross_from(
    sys: &DiscreteSystem,
    report: &mut LinearizationReport,
    cands: &[Candidate],
    opts: &LinearizeOptions,
) -> Result<()> {
    let under = sys.underline();
    for c in cands {
        let t = &c.ground.hat;
        let Some(hom) = detect_homogeneous_sum(t) else {
            report
                .diagnostics
                .push(format!("quotient {} is not a homogeneous sum", t.render()));
            continue;
        };
        if hom.lambda.is_zero() || hom.mu.is_zero() {
            report
                .diagnostics
                .push(format!("quotient {} has a vanishing weight", t.render()));
            continue;
        }
        let hat = hom.hat();
        if !hat.is_proper() {
            report
                .diagnostics
                .push(format!("quotient {} is not proper", hat.render()));
            continue;
        }
        let l = c.ground.g.scale(&hom.lambda);
        let m = c.ground.h.scale(&hom.mu);
        if star_combined(&hat, &l.to_depoly().add(&m.to_depoly())) != under {
            report.diagnostics.push(format!(
                "{} * ({} + {}) does not reproduce the system",
                hat.render(),
                l.render(),
                m.render()
            ));
            continue;
        }
        let system = match LinearSystem::new(l.clone(), m.scale(&-Q::one())) {
            Ok(s) => s.normalized(),
            Err(e) => {
                report.diagnostics.push(e.to_string());
                continue;
            }
        };
        let s = Solution {
            system,
            l,
            m,
            hat,
            hat_b: None,
            kappa: hom.mu.clone() / &hom.lambda,
            lambda: Some(Q::one()),
            mu: Some(Q::one()),
            families: c.families.clone(),
            rule_sets: c.rule_sets.clone(),
            certificate: placeholder(opts),
        };
        record(report, sys, opts, s)?;
    }
    Ok(())
}

/// For systems with cross terms; also applicable without them.
pub fn linearize_cross(
    sys: &DiscreteSystem,
    opts: &LinearizeOptions,
) -> Result<LinearizationReport> {
    require_valid(sys)?;
    let mut report = LinearizationReport::new(Algorithm::Cross);
    let under = sys.underline();
    let f = fdel_algorithm(&under)?;
    let (ld, le, _) = under.decompose_linear();
    let gs = tie_options(&f, &ld, Kind::Delta, &mut report.diagnostics);
    let hs = tie_options(&f, &le, Kind::Eps, &mut report.diagnostics);
    let mut choices = Vec::new();
    for g in &gs {
        for h in &hs {
            choices.push(vec![g.clone(), h.clone()]);
        }
    }
    let cands = search(
        &f,
        &choices,
        &[Kind::Delta, Kind::Eps],
        "A - B - C",
        opts,
        &mut report.diagnostics,
    );
    report.factorizations.push(("A - B - C".into(), f));
    cross_from(sys, &mut report, &cands, opts)?;
    report.finish()
}

/// Skips the solver: the factorization is evaluated under `rules`.
pub fn linearize_with_rules(
    sys: &DiscreteSystem,
    algorithm: Algorithm,
    rules: &RuleSet,
    opts: &LinearizeOptions,
) -> Result<LinearizationReport> {
    require_valid(sys)?;
    let mut report = LinearizationReport::new(algorithm);
    let ground = |f: &Factorization, kinds: &[Kind], diags: &mut Vec<String>| {
        let missing: Vec<String> = f
            .params()
            .into_iter()
            .filter(|p| rules.get(p).is_none())
            .map(|p| p.to_string())
            .collect();
        if !missing.is_empty() {
            diags.push(format!("rule set leaves unbound: {}", missing.join(", ")));
        }
        match ground_side(&evaluate(f, rules), kinds) {
            Ok(g) => vec![Candidate {
                ground: g,
                families: vec![Family {
                    bindings: rules
                        .bindings
                        .iter()
                        .map(|(k, v)| (*k, ParamPoly::constant(v.clone())))
                        .collect(),
                    free: Default::default(),
                }],
                rule_sets: vec![rules.clone()],
            }],
            Err(e) => {
                diags.push(e);
                Vec::new()
            }
        }
    };
    match algorithm {
        Algorithm::NoCross => {
            if sys.has_cross_terms() {
                return Err(Error::Semantic(
                    "the no-cross algorithm needs a system without cross terms".into(),
                ));
            }
            let fa = fdel_algorithm(&sys.a)?;
            let fb = fdel_algorithm(&sys.b)?;
            let ca = ground(&fa, &[Kind::Delta], &mut report.diagnostics);
            let cb = ground(&fb, &[Kind::Eps], &mut report.diagnostics);
            report.factorizations.push(("A".into(), fa));
            report.factorizations.push(("B".into(), fb));
            let rs = vec![rules.clone()];
            let ca: Vec<Candidate> = ca
                .into_iter()
                .map(|c| Candidate {
                    rule_sets: rs.clone(),
                    ..c
                })
                .collect();
            let cb: Vec<Candidate> = cb
                .into_iter()
                .map(|c| Candidate {
                    rule_sets: vec![RuleSet::new()],
                    families: vec![Family::default()],
                    ..c
                })
                .collect();
            no_cross_from(sys, &mut report, &ca, &cb, opts)?;
        }
        Algorithm::Cross => {
            let under = sys.underline();
            let f = fdel_algorithm(&under)?;
            let c = ground(&f, &[Kind::Delta, Kind::Eps], &mut report.diagnostics);
            report.factorizations.push(("A - B - C".into(), f));
            cross_from(sys, &mut report, &c, opts)?;
        }
    }
    report.finish()
}
