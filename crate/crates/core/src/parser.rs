//! Equation text: time-domain `2*y(t) + y(t-1) = u(t-1)` or operator
//! `2 d0 + d1 = e1`, an optional `init: 0, 1/2` line and `#` comments.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::depoly::DePoly;
use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::operator::DeOp;
use crate::rational::{parse_q, Q};
use crate::system::DiscreteSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Syntax {
    TimeDomain,
    Operator,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Source {
    System {
        system: DiscreteSystem,
        syntax: Syntax,
    },
    /// A bare δε-polynomial, no `=`.
    Polynomial { poly: DePoly<Q>, syntax: Syntax },
}

impl Source {
    pub fn syntax(&self) -> Syntax {
        match self {
            Source::System { syntax, .. } | Source::Polynomial { syntax, .. } => *syntax,
        }
    }
}

const TERM_START: &[&str] = &["number", "y(t-i)", "u(t-j)", "d<i>", "e<j>"];

struct Parser {
    chars: Vec<char>,
    pos: usize,
    saw_time: Option<usize>,
    saw_op: Option<usize>,
}

type Term = (Q, DeOp);

impl Parser {
    fn location(&self, pos: usize) -> (usize, usize) {
        let mut line = 1;
        let mut col = 1;
        for &c in &self.chars[..pos.min(self.chars.len())] {
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        (line, col)
    }

    fn error_at<T>(&self, pos: usize, message: impl Into<String>, expected: &[&str]) -> Result<T> {
        let (line, column) = self.location(pos);
        Err(Error::Parse {
            line,
            column,
            message: message.into(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn error<T>(&self, message: impl Into<String>, expected: &[&str]) -> Result<T> {
        self.error_at(self.pos, message, expected)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).copied()
    }

    fn describe(&self) -> String {
        match self.chars.get(self.pos) {
            Some(c) => format!("unexpected `{c}`"),
            None => "unexpected end of input".to_string(),
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            let e = format!("`{c}`");
            self.error(self.describe(), &[e.as_str()])
        }
    }

    fn digits(&mut self) -> Option<String> {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.chars[start..self.pos].iter().collect())
    }

    fn integer(&mut self) -> Result<u32> {
        self.skip_ws();
        let at = self.pos;
        match self.digits() {
            Some(s) => match s.parse() {
                Ok(v) => Ok(v),
                Err(_) => self.error_at(at, "integer too large", &["integer"]),
            },
            None => self.error(self.describe(), &["integer"]),
        }
    }

    /// `12`, `3/4`, `0.25`.
    fn number(&mut self) -> Result<Q> {
        self.skip_ws();
        let at = self.pos;
        let int = self.digits().unwrap_or_default();
        let mut value = if self.chars.get(self.pos) == Some(&'.') {
            self.pos += 1;
            let frac = self.digits().unwrap_or_default();
            if int.is_empty() && frac.is_empty() {
                return self.error_at(at, "malformed number", &["digit"]);
            }
            decimal(&int, &frac)
        } else if int.is_empty() {
            return self.error(self.describe(), &["number"]);
        } else {
            Q::from_integer(int.parse::<BigInt>().expect("digits"))
        };
        let save = self.pos;
        if self.peek() == Some('/') {
            self.pos += 1;
            self.skip_ws();
            let den_at = self.pos;
            let den = match self.digits() {
                Some(d) => d.parse::<BigInt>().expect("digits"),
                None => return self.error(self.describe(), &["integer"]),
            };
            if den.is_zero() {
                return self.error_at(den_at, "zero denominator", &["nonzero integer"]);
            }
            value /= Q::from_integer(den);
        } else {
            self.pos = save;
        }
        Ok(value)
    }

    fn exponent(&mut self) -> Result<usize> {
        let save = self.pos;
        if self.peek() == Some('^') {
            self.pos += 1;
            let n = self.integer()?;
            if n == 0 {
                return self.error_at(self.pos - 1, "zero exponent", &["positive integer"]);
            }
            Ok(n as usize)
        } else {
            self.pos = save;
            Ok(1)
        }
    }

    /// `y(t)`, `y(t-2)`, `y^2(t-2)`, `y(t-2)^2`.
    fn signal(&mut self) -> Result<(u32, usize)> {
        self.pos += 1;
        let pre = self.exponent()?;
        self.expect('(')?;
        self.expect('t')?;
        let delay = match self.peek() {
            Some('-') => {
                self.pos += 1;
                self.integer()?
            }
            Some(')') => 0,
            Some('+') => return self.error("non-causal shift", &["`-`", "`)`"]),
            _ => return self.error(self.describe(), &["`-`", "`)`"]),
        };
        self.expect(')')?;
        let post = self.exponent()?;
        Ok((delay, pre * post))
    }

    fn starts_factor(&self) -> bool {
        match self.chars.get(self.pos) {
            Some(c) if c.is_ascii_digit() || *c == '.' => true,
            Some('y') | Some('u') => true,
            Some('d') | Some('e') => self.peek_at(1).is_some_and(|c| c.is_ascii_digit()),
            _ => false,
        }
    }

    fn term(&mut self) -> Result<Term> {
        let mut coeff = Q::one();
        let (mut d, mut e) = (Vec::new(), Vec::new());
        let mut first = true;
        loop {
            self.skip_ws();
            if !self.starts_factor() {
                if first {
                    return self.error(self.describe(), TERM_START);
                }
                break;
            }
            first = false;
            let at = self.pos;
            match self.chars[self.pos] {
                'y' | 'u' => {
                    let sym = self.chars[self.pos];
                    self.saw_time.get_or_insert(at);
                    let (delay, n) = self.signal()?;
                    let v = if sym == 'y' { &mut d } else { &mut e };
                    v.extend(std::iter::repeat_n(delay, n));
                }
                'd' | 'e' => {
                    let sym = self.chars[self.pos];
                    self.saw_op.get_or_insert(at);
                    self.pos += 1;
                    let delay = self.integer()?;
                    let n = self.exponent()?;
                    let v = if sym == 'd' { &mut d } else { &mut e };
                    v.extend(std::iter::repeat_n(delay, n));
                }
                _ => coeff *= self.number()?,
            }
            if self.peek() == Some('*') {
                self.pos += 1;
                self.skip_ws();
                if !self.starts_factor() {
                    return self.error(self.describe(), TERM_START);
                }
            }
        }
        Ok((coeff, DeOp::new(MultiIndex::new(d), MultiIndex::new(e))))
    }

    fn side(&mut self) -> Result<Vec<Term>> {
        let mut out = Vec::new();
        let mut sign = Q::one();
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                sign = -sign;
            }
            Some('+') => self.pos += 1,
            _ => {}
        }
        loop {
            let (c, op) = self.term()?;
            out.push((c * &sign, op));
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    sign = Q::one();
                }
                Some('-') => {
                    self.pos += 1;
                    sign = -Q::one();
                }
                _ => return Ok(out),
            }
        }
    }

    fn syntax(&self) -> Syntax {
        match (self.saw_time, self.saw_op) {
            (Some(a), Some(b)) if b < a => Syntax::Operator,
            (None, Some(_)) => Syntax::Operator,
            _ => Syntax::TimeDomain,
        }
    }
}

fn decimal(int: &str, frac: &str) -> Q {
    let digits = format!("{int}{frac}");
    let n: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().expect("digits")
    };
    Q::new(n, BigInt::from(10u32).pow(frac.len() as u32))
}

fn parse_value(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some(v) = parse_q(s) {
        return Some(v);
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.')?;
    if int.chars().chain(frac.chars()).any(|c| !c.is_ascii_digit())
        || (int.is_empty() && frac.is_empty())
    {
        return None;
    }
    let v = decimal(int, frac);
    Some(if neg { -v } else { v })
}

/// Comments and the `init:` line blanked out, positions kept.
fn preprocess(text: &str) -> Result<(Vec<char>, Option<Vec<Q>>)> {
    let mut out = String::with_capacity(text.len());
    let mut init = None;
    for (ln, raw) in text.split_inclusive('\n').enumerate() {
        let (body, nl) = match raw.strip_suffix('\n') {
            Some(b) => (b, "\n"),
            None => (raw, ""),
        };
        let code = match body.find('#') {
            Some(i) => &body[..i],
            None => body,
        };
        let trimmed = code.trim_start();
        if let Some(rest) = trimmed.strip_prefix("init") {
            if let Some(vals) = rest.trim_start().strip_prefix(':') {
                if init.is_some() {
                    return Err(Error::Parse {
                        line: ln + 1,
                        column: code.len() - trimmed.len() + 1,
                        message: "second init line".into(),
                        expected: vec!["equation".into()],
                    });
                }
                let mut v = Vec::new();
                let offset = code.len() - vals.len();
                let mut col = offset;
                for piece in vals.split(',') {
                    if !(piece.trim().is_empty() && vals.trim().is_empty()) {
                        match parse_value(piece) {
                            Some(q) => v.push(q),
                            None => {
                                let lead = piece.len() - piece.trim_start().len();
                                return Err(Error::Parse {
                                    line: ln + 1,
                                    column: col + lead + 1,
                                    message: format!("bad initial value `{}`", piece.trim()),
                                    expected: vec!["rational".into()],
                                });
                            }
                        }
                    }
                    col += piece.len() + 1;
                }
                init = Some(v);
                out.extend(std::iter::repeat_n(' ', body.chars().count()));
                out.push_str(nl);
                continue;
            }
        }
        out.push_str(code);
        out.extend(std::iter::repeat_n(' ', body[code.len()..].chars().count()));
        out.push_str(nl);
    }
    Ok((out.chars().collect(), init))
}

fn collect(terms: &[Term], sign: &Q, into: &mut DePoly<Q>) {
    for (c, op) in terms {
        into.add_term(op.clone(), c * sign);
    }
}

pub fn parse_source(text: &str) -> Result<Source> {
    let (chars, init) = preprocess(text)?;
    let mut p = Parser {
        chars,
        pos: 0,
        saw_time: None,
        saw_op: None,
    };
    if p.peek().is_none() {
        return p.error("empty input", TERM_START);
    }
    let lhs = p.side()?;
    let rhs = if p.peek() == Some('=') {
        p.pos += 1;
        Some(p.side()?)
    } else {
        None
    };
    if p.peek().is_some() {
        let expected: &[&str] = if rhs.is_some() {
            &["`+`", "`-`", "end of input"]
        } else {
            &["`+`", "`-`", "`=`", "end of input"]
        };
        return p.error(p.describe(), expected);
    }
    let syntax = p.syntax();
    let Some(rhs) = rhs else {
        if init.is_some() {
            return Err(Error::Semantic(
                "initial values given for a bare polynomial".into(),
            ));
        }
        let mut poly = DePoly::zero();
        collect(&lhs, &Q::one(), &mut poly);
        return Ok(Source::Polynomial { poly, syntax });
    };
    // everything on the left, then split by shape
    let mut all = DePoly::zero();
    collect(&lhs, &Q::one(), &mut all);
    collect(&rhs, &-Q::one(), &mut all);
    let (mut a, mut b, mut c) = (DePoly::zero(), DePoly::zero(), DePoly::zero());
    for (op, v) in all.terms() {
        if op.is_identity() {
            return Err(Error::Semantic(format!("constant term {v}")));
        } else if op.e.is_empty() {
            a.add_term(op.clone(), v.clone());
        } else if op.d.is_empty() {
            b.add_term(op.clone(), -v.clone());
        } else {
            c.add_term(op.clone(), -v.clone());
        }
    }
    Ok(Source::System {
        system: DiscreteSystem::new(a, b, c, init.unwrap_or_default()),
        syntax,
    })
}

pub fn parse_system(text: &str) -> Result<DiscreteSystem> {
    match parse_source(text)? {
        Source::System { system, .. } => Ok(system),
        Source::Polynomial { .. } => Err(Error::Semantic("expected an equation with `=`".into())),
    }
}

/// A bare polynomial; an equation is read as `lhs - rhs`.
pub fn parse_polynomial(text: &str) -> Result<DePoly<Q>> {
    match parse_source(text)? {
        Source::Polynomial { poly, .. } => Ok(poly),
        Source::System { system, .. } => Ok(system.underline()),
    }
}
