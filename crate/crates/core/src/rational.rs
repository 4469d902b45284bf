//! Rational helpers over `BigRational`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Q::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Q::from_integer),
    }
}

pub fn pow(x: &Q, n: usize) -> Q {
    let mut r = Q::one();
    for _ in 0..n {
        r *= x;
    }
    r
}

/// The rational `n`-th roots of `x` (so at most two).
pub fn nth_roots(x: &Q, n: usize) -> Vec<Q> {
    if n == 0 {
        return Vec::new();
    }
    if x.is_zero() {
        return vec![Q::zero()];
    }
    if x.is_negative() && n.is_multiple_of(2) {
        return Vec::new();
    }
    let (num, den) = (x.numer().abs(), x.denom().clone());
    let (Some(a), Some(b)) = (int_root(&num, n), int_root(&den, n)) else {
        return Vec::new();
    };
    let r = Q::new(a, b);
    if n.is_multiple_of(2) {
        vec![-r.clone(), r]
    } else if x.is_negative() {
        vec![-r]
    } else {
        vec![r]
    }
}

fn int_root(x: &BigInt, n: usize) -> Option<BigInt> {
    let r = x.nth_root(n as u32);
    (num_traits::pow(r.clone(), n) == *x).then_some(r)
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let mut r: u64 = 1;
    for i in 0..k.min(n - k) {
        r = r * (n - i) as u64 / (i + 1) as u64;
    }
    r
}

/// Decimal rendering rounded toward zero with `digits` fractional digits.
pub fn to_decimal(x: &Q, digits: usize) -> String {
    let neg = x.is_negative();
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (x.abs() * Q::from_integer(scale.clone())).to_integer();
    let (int, frac) = scaled.div_rem(&scale);
    let mut s = String::new();
    if neg && !scaled.is_zero() {
        s.push('-');
    }
    s.push_str(&int.to_string());
    if digits > 0 {
        s.push('.');
        s.push_str(&format!("{:0>width$}", frac.to_string(), width = digits));
    }
    s
}
