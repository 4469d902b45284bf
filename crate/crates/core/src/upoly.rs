//! Dense univariate polynomials over ℚ, `p[k]` the coefficient of `x^k`.
//! Linear δ/ε polynomials compose like these under star-composition.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::Q;

pub type UPoly = Vec<Q>;

/// Largest absolute value whose divisors we enumerate by trial division.
const DIVISOR_SEARCH_CAP: u64 = 1 << 40;

pub fn trim(mut p: UPoly) -> UPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

pub fn degree(p: &[Q]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn monic(p: &[Q]) -> UPoly {
    let p = trim(p.to_vec());
    match p.last() {
        Some(lc) => {
            let lc = lc.clone();
            p.into_iter().map(|c| c / &lc).collect()
        }
        None => p,
    }
}

pub fn mul(a: &[Q], b: &[Q]) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            r[i + j] += x * y;
        }
    }
    trim(r)
}

/// `(quotient, remainder)`; panics on a zero divisor.
pub fn divrem(a: &[Q], b: &[Q]) -> (UPoly, UPoly) {
    let b = trim(b.to_vec());
    let db = degree(&b).expect("division by zero polynomial");
    let mut r = trim(a.to_vec());
    let lc = b[db].clone();
    let mut qt = vec![Q::zero(); r.len().saturating_sub(db).max(1)];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = &r[dr] / &lc;
        for (k, bk) in b.iter().enumerate() {
            r[dr - db + k] -= &c * bk;
        }
        qt[dr - db] = c;
        r = trim(r);
    }
    (trim(qt), r)
}

/// Monic gcd; the gcd of two zero polynomials is zero.
pub fn gcd(a: &[Q], b: &[Q]) -> UPoly {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let (_, r) = divrem(&a, &b);
        a = b;
        b = r;
    }
    monic(&a)
}

pub fn eval(p: &[Q], x: &Q) -> Q {
    let mut acc = Q::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Integer coefficients with the same roots, content removed.
fn primitive(p: &[Q]) -> Vec<BigInt> {
    let l = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p
        .iter()
        .map(|c| (c * Q::from_integer(l.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|c| c / &g).collect()
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64().filter(|&v| v <= DIVISOR_SEARCH_CAP)?;
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(BigInt::from(d));
            if d * d != n {
                large.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Some(small)
}

/// Rational roots with multiplicity, ascending. `None` when the
/// coefficients are too large to enumerate candidate divisors.
pub fn rational_roots(p: &[Q]) -> Option<Vec<(Q, usize)>> {
    let mut p = trim(p.to_vec());
    let mut out = Vec::new();
    if p.is_empty() {
        return Some(out);
    }
    let zeros = p.iter().take_while(|c| c.is_zero()).count();
    if zeros > 0 {
        out.push((Q::zero(), zeros));
        p.drain(..zeros);
    }
    if p.len() <= 1 {
        return Some(out);
    }
    let ints = primitive(&p);
    let num_divs = divisors(&ints[0])?;
    let den_divs = divisors(ints.last().unwrap())?;
    let mut cands: Vec<Q> = Vec::new();
    for a in &num_divs {
        for b in &den_divs {
            let r = Q::new(a.clone(), b.clone());
            cands.push(r.clone());
            cands.push(-r);
        }
    }
    cands.sort();
    cands.dedup();
    for r in cands {
        let mut k = 0;
        while p.len() > 1 && eval(&p, &r).is_zero() {
            let (qt, _) = divrem(&p, &[-r.clone(), Q::one()]);
            p = qt;
            k += 1;
        }
        if k > 0 {
            out.push((r, k));
        }
    }
    out.sort();
    Some(out)
}

/// Monic divisors of `p` of positive or zero degree, built from its rational
/// linear factors and the remaining cofactor. `None` if root search fails.
pub fn monic_divisors(p: &[Q]) -> Option<Vec<UPoly>> {
    let p = monic(p);
    if p.is_empty() {
        return Some(Vec::new());
    }
    let roots = rational_roots(&p)?;
    let mut linear = vec![Q::one()];
    for (r, k) in &roots {
        for _ in 0..*k {
            linear = mul(&linear, &[-r.clone(), Q::one()]);
        }
    }
    let (residual, _) = divrem(&p, &linear);
    let mut acc: Vec<UPoly> = vec![vec![Q::one()]];
    for (r, k) in &roots {
        let f = vec![-r.clone(), Q::one()];
        let mut next = Vec::new();
        for base in &acc {
            let mut cur = base.clone();
            next.push(cur.clone());
            for _ in 0..*k {
                cur = mul(&cur, &f);
                next.push(cur.clone());
            }
        }
        acc = next;
    }
    if degree(&residual).unwrap_or(0) > 0 {
        let with: Vec<UPoly> = acc.iter().map(|d| mul(d, &residual)).collect();
        acc.extend(with);
    }
    let mut uniq: BTreeMap<(usize, Vec<Q>), UPoly> = BTreeMap::new();
    for d in acc {
        uniq.insert((d.len(), d.clone()), d);
    }
    Some(uniq.into_values().collect())
}
