//! Strategies and property bodies shared by the property tests and the
//! acceptance runner.

#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use num_traits::Zero;

use detool_core::depoly::{detect_homogeneous_sum, make_homogeneous, shift_product_mixed};
use detool_core::operator::DeOp;
use detool_core::rational::qr;
use detool_core::{
    fdel_algorithm, linear_divide, linear_gcd, DePoly, Kind, LinearPoly, MultiIndex, ParamId,
    ParamPoly, RuleSet, Signal, Q,
};

pub const CASES: u32 = 256;

pub fn config() -> Config {
    Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    }
}

pub fn rational() -> impl Strategy<Value = Q> {
    (-6i64..=6, 1i64..=3).prop_map(|(n, d)| qr(n, d))
}

pub fn nonzero() -> impl Strategy<Value = Q> {
    (1i64..=6, 1i64..=3, any::<bool>()).prop_map(|(n, d, neg)| qr(if neg { -n } else { n }, d))
}

pub fn index(min_len: usize, max_len: usize, max_delay: u32) -> impl Strategy<Value = MultiIndex> {
    prop::collection::vec(0..=max_delay, min_len..=max_len).prop_map(MultiIndex::new)
}

/// Operators of total degree in `lo..=hi`.
pub fn op(lo: usize, hi: usize, max_delay: u32) -> impl Strategy<Value = DeOp> {
    (lo..=hi)
        .prop_flat_map(move |n| (0..=n).prop_map(move |k| (k, n - k)))
        .prop_flat_map(move |(a, b)| (index(a, a, max_delay), index(b, b, max_delay)))
        .prop_map(|(d, e)| DeOp::new(d, e))
}

pub fn depoly(
    terms: usize,
    lo: usize,
    hi: usize,
    max_delay: u32,
) -> impl Strategy<Value = DePoly<Q>> {
    prop::collection::vec((op(lo, hi, max_delay), nonzero()), 1..=terms)
        .prop_map(|ts| ts.into_iter().collect())
}

/// Nonlinear part of degree 2..=3 plus optional linear parts.
pub fn factorizable() -> impl Strategy<Value = DePoly<Q>> {
    (
        depoly(3, 2, 3, 4),
        prop::collection::vec((0u32..=4, nonzero()), 0..=2),
        prop::collection::vec((0u32..=4, nonzero()), 0..=2),
    )
        .prop_map(|(nl, ld, le)| {
            let mut p = nl;
            for (d, c) in ld {
                p.add_term(DeOp::delta([d]), c);
            }
            for (d, c) in le {
                p.add_term(DeOp::eps([d]), c);
            }
            p
        })
}

pub fn linear(kind: Kind, max_delay: u32) -> impl Strategy<Value = LinearPoly<Q>> {
    prop::collection::vec(rational(), 1..=(max_delay as usize + 1)).prop_filter_map(
        "nonzero",
        move |cs| {
            let p = LinearPoly::from_coeffs(kind, cs);
            (!p.is_zero()).then_some(p)
        },
    )
}

pub fn signal(len: usize) -> impl Strategy<Value = Signal> {
    prop::collection::vec(rational(), len).prop_map(Signal::new)
}

pub fn parampoly() -> impl Strategy<Value = ParamPoly> {
    let var = (0u32..3, 0u32..2, any::<bool>()).prop_map(|(i, d, w)| {
        if w {
            ParamId::w(i + 1, d)
        } else {
            ParamId::s(i + 1, d)
        }
    });
    prop::collection::vec((prop::collection::vec(var, 0..=2), rational()), 0..=4).prop_map(|ts| {
        let mut p = ParamPoly::zero();
        for (vs, c) in ts {
            let mut m = ParamPoly::constant(c);
            for v in vs {
                m = m.mul(&ParamPoly::var(v));
            }
            p.add_assign(&m);
        }
        p
    })
}

/// `z(t) = (L x)(t)`, zero before time 0.
pub fn apply_signal(l: &LinearPoly<Q>, x: &Signal) -> Signal {
    Signal::new((0..x.len()).map(|t| l.apply(x, t)).collect())
}

const WINDOW: std::ops::Range<usize> = 10..22;

pub fn dot_numeric(
    a: &DePoly<Q>,
    b: &DePoly<Q>,
    y: &Signal,
    u: &Signal,
) -> Result<(), TestCaseError> {
    let ab = a.dot(b);
    for t in WINDOW {
        prop_assert_eq!(ab.eval(y, u, t), a.eval(y, u, t) * b.eval(y, u, t));
    }
    Ok(())
}

/// `A ∗ [L, M]` evaluated on `(y, u)` equals `A` evaluated on `(L y, M u)`.
pub fn star_numeric(
    a: &DePoly<Q>,
    l: &LinearPoly<Q>,
    m: &LinearPoly<Q>,
    y: &Signal,
    u: &Signal,
) -> Result<(), TestCaseError> {
    let s = a.star_linear(l, m);
    let (ly, mu) = (apply_signal(l, y), apply_signal(m, u));
    for t in WINDOW {
        prop_assert_eq!(s.eval(y, u, t), a.eval(&ly, &mu, t));
    }
    Ok(())
}

/// Star distributes over `+` and `·` of the outer polynomial and composes.
pub fn star_laws(
    a: &DePoly<Q>,
    b: &DePoly<Q>,
    l1: &LinearPoly<Q>,
    m1: &LinearPoly<Q>,
    l2: &LinearPoly<Q>,
    m2: &LinearPoly<Q>,
) -> Result<(), TestCaseError> {
    prop_assert_eq!(
        a.add(b).star_linear(l1, m1),
        a.star_linear(l1, m1).add(&b.star_linear(l1, m1))
    );
    prop_assert_eq!(
        a.dot(b).star_linear(l1, m1),
        a.star_linear(l1, m1).dot(&b.star_linear(l1, m1))
    );
    prop_assert_eq!(
        a.star_linear(&l1.compose(l2), &m1.compose(m2)),
        a.star_linear(l1, m1).star_linear(l2, m2)
    );
    Ok(())
}

/// `homogeneous(θ, λ, μ) ∗ [L, M] = δ_θ ∗ (λL + μM)`, and detection
/// recovers the decomposition.
pub fn homogeneous_round_trip(
    theta: &MultiIndex,
    lambda: &Q,
    mu: &Q,
    l: &LinearPoly<Q>,
    m: &LinearPoly<Q>,
) -> Result<(), TestCaseError> {
    let h = make_homogeneous(theta, lambda, mu);
    let lm = l.to_depoly().scale(lambda).add(&m.to_depoly().scale(mu));
    prop_assert_eq!(h.star_linear(l, m), shift_product_mixed(theta, &lm));
    if !lambda.is_zero() {
        let found = detect_homogeneous_sum(&h);
        prop_assert!(found.is_some(), "not detected: {}", h.render());
        let found = found.unwrap();
        prop_assert_eq!(found.expand(), h);
    }
    Ok(())
}

/// `Σ c_k op_k ∗ [L_k, M_k] + R = A` symbolically, and again after any
/// substitution of the parameters.
pub fn reconstruction(a: &DePoly<Q>, values: &[Q]) -> Result<(), TestCaseError> {
    let f = fdel_algorithm(a).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(f.reconstruct(), a.to_param());
    let rules: RuleSet = f
        .params()
        .into_iter()
        .zip(values.iter().cycle())
        .map(|(p, v)| (p, v.clone()))
        .collect();
    let fe = detool_core::evaluate(&f, &rules);
    prop_assert_eq!(fe.reconstruct().to_rational(), Some(a.clone()));
    Ok(())
}

/// Remainder terms are zero terms and each pass removes a strictly smaller
/// maximum term.
pub fn remainder_purity(a: &DePoly<Q>) -> Result<(), TestCaseError> {
    let f = fdel_algorithm(a).map_err(|e| TestCaseError::fail(e.to_string()))?;
    for op in f.remainder.terms().keys() {
        prop_assert!(
            op.is_zero_term(),
            "remainder term {} is not a zero term",
            op.render()
        );
    }
    let tops: Vec<&DeOp> = f.subroutine_terms().map(|t| &t.top).collect();
    for w in tops.windows(2) {
        prop_assert!(w[1] < w[0], "{} then {}", w[0].render(), w[1].render());
    }
    let passes: Vec<u32> = f.subroutine_terms().map(|t| t.pass).collect();
    prop_assert!(passes.windows(2).all(|w| w[1] == w[0] + 1));
    Ok(())
}

/// Divisibility laws, checked both on coefficients and as operators on signals.
pub fn gcd_laws(
    a: &LinearPoly<Q>,
    b: &LinearPoly<Q>,
    c: &LinearPoly<Q>,
    y: &Signal,
) -> Result<(), TestCaseError> {
    let ab = a.compose(b);
    prop_assert_eq!(linear_divide(&ab, b).ok(), Some(a.clone()));
    let by_signal = apply_signal(a, &apply_signal(b, y));
    prop_assert_eq!(apply_signal(&ab, y), by_signal);
    let g = linear_gcd(&[a.clone(), b.clone()]);
    for p in [a, b] {
        let q = linear_divide(p, &g);
        prop_assert!(q.is_ok(), "{} does not divide {}", g.render(), p.render());
        prop_assert_eq!(&g.compose(&q.unwrap()), p);
    }
    // gcd(a c, b c) = gcd(a, b) · monic(c)
    let lead = c.coeff(c.max_delay().unwrap());
    let cm = c.scale(&(qr(1, 1) / lead));
    prop_assert_eq!(linear_gcd(&[a.compose(c), b.compose(c)]), g.compose(&cm));
    Ok(())
}

pub fn ring_laws(a: &ParamPoly, b: &ParamPoly, c: &ParamPoly) -> Result<(), TestCaseError> {
    prop_assert_eq!(a.add(b), b.add(a));
    prop_assert_eq!(a.mul(b), b.mul(a));
    prop_assert_eq!(a.mul(b).mul(c), a.mul(&b.mul(c)));
    prop_assert_eq!(a.mul(&b.add(c)), a.mul(b).add(&a.mul(c)));
    prop_assert_eq!(a.sub(a), ParamPoly::zero());
    let rules: RuleSet = a
        .vars()
        .into_iter()
        .chain(b.vars())
        .enumerate()
        .map(|(k, v)| (v, qr(k as i64 - 2, 3)))
        .collect();
    let ev = |p: &ParamPoly| p.substitute(&rules).constant_value().unwrap();
    prop_assert_eq!(ev(&a.mul(b)), ev(a) * ev(b));
    Ok(())
}

/// Runs a property through proptest's runner, for the acceptance binary.
pub fn run<S: Strategy>(
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(config());
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

pub fn lin_pair() -> impl Strategy<Value = (LinearPoly<Q>, LinearPoly<Q>)> {
    (linear(Kind::Delta, 3), linear(Kind::Eps, 3))
}

/// Every property of the suite, by name.
pub fn all() -> Vec<(&'static str, Result<(), String>)> {
    let mut out = Vec::new();
    out.push((
        "dot numeric",
        run(
            (
                depoly(3, 1, 3, 4),
                depoly(3, 1, 3, 4),
                signal(24),
                signal(24),
            ),
            |(a, b, y, u)| dot_numeric(&a, &b, &y, &u),
        ),
    ));
    out.push((
        "star numeric",
        run(
            (depoly(3, 1, 3, 4), lin_pair(), signal(24), signal(24)),
            |(a, (l, m), y, u)| star_numeric(&a, &l, &m, &y, &u),
        ),
    ));
    out.push((
        "star laws",
        run(
            (
                depoly(2, 1, 2, 3),
                depoly(2, 1, 2, 3),
                lin_pair(),
                lin_pair(),
            ),
            |(a, b, (l1, m1), (l2, m2))| star_laws(&a, &b, &l1, &m1, &l2, &m2),
        ),
    ));
    out.push((
        "homogeneous round trip",
        run(
            (index(1, 3, 4), rational(), nonzero(), lin_pair()),
            |(t, la, mu, (l, m))| homogeneous_round_trip(&t, &la, &mu, &l, &m),
        ),
    ));
    out.push((
        "reconstruction",
        run(
            (factorizable(), prop::collection::vec(rational(), 1..4)),
            |(a, v)| reconstruction(&a, &v),
        ),
    ));
    out.push((
        "remainder purity",
        run(factorizable(), |a| remainder_purity(&a)),
    ));
    out.push((
        "gcd laws",
        run(
            (
                linear(Kind::Delta, 3),
                linear(Kind::Delta, 3),
                linear(Kind::Delta, 2),
                signal(16),
            ),
            |(a, b, c, y)| gcd_laws(&a, &b, &c, &y),
        ),
    ));
    out.push((
        "parameter ring laws",
        run((parampoly(), parampoly(), parampoly()), |(a, b, c)| {
            ring_laws(&a, &b, &c)
        }),
    ));
    out
}

/// `δ_(0,0)` applied to `y1 + y2` differs from the sum of the applications.
pub fn non_distributive_witness() -> (Q, Q) {
    let op = DeOp::delta([0, 0]);
    let y1 = Signal::new(vec![qr(1, 1)]);
    let y2 = Signal::new(vec![qr(2, 1)]);
    let sum = Signal::new(vec![qr(3, 1)]);
    let u = Signal::new(vec![qr(0, 1)]);
    let whole = op.eval(&sum, &u, 0);
    let parts = op.eval(&y1, &u, 0) + op.eval(&y2, &u, 0);
    (whole, parts)
}
