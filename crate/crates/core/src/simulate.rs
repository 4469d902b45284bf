//! Exact simulation and equivalence certification.
//!
//! The nonlinear recursion evaluates the system's terms directly and never
//! goes through the factorization machinery, so it can falsify it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linearize::LinearSystem;
use crate::operator::{DeOp, Signal};
use crate::rational::{to_decimal, Q};
use crate::system::DiscreteSystem;

/// Random inputs are `n / 10^6` with `0 < n < 10^6`.
pub const INPUT_DENOMINATOR: u64 = 1_000_000;
/// Re-draws allowed per trial after a zero pivot.
pub const REDRAW_CAP: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub inputs: Signal,
    pub outputs: Signal,
    pub horizon: usize,
}

pub fn random_input(rng: &mut ChaCha8Rng, horizon: usize) -> Signal {
    let d = BigInt::from(INPUT_DENOMINATOR);
    Signal::new(
        (0..horizon)
            .map(|_| {
                let n: u64 = rng.random_range(1..INPUT_DENOMINATOR);
                Q::new(BigInt::from(n), d.clone())
            })
            .collect(),
    )
}

pub fn seeded_input(seed: u64, horizon: usize) -> Signal {
    random_input(&mut ChaCha8Rng::seed_from_u64(seed), horizon)
}

fn check_input(u: &Signal, horizon: usize) -> Result<()> {
    if u.len() < horizon {
        return Err(Error::Semantic(format!(
            "input has {} samples, horizon is {horizon}",
            u.len()
        )));
    }
    Ok(())
}

/// Uses the system's own initial conditions.
pub fn simulate_nonlinear(sys: &DiscreteSystem, u: &Signal, horizon: usize) -> Result<Trace> {
    simulate_nonlinear_from(sys, u, &sys.init, horizon)
}

/// For `t < k` the outputs are `init`; afterwards `y(t)` is solved from the
/// terms containing the lowest output delay, where it enters linearly.
pub fn simulate_nonlinear_from(
    sys: &DiscreteSystem,
    u: &Signal,
    init: &[Q],
    horizon: usize,
) -> Result<Trace> {
    let v = sys.validate();
    let shape: Vec<String> = v
        .into_iter()
        .filter(|m| !m.starts_with("expected"))
        .collect();
    if !shape.is_empty() {
        return Err(Error::InvalidSystem(shape));
    }
    let k = sys.order();
    if init.len() != k {
        return Err(Error::InvalidSystem(vec![format!(
            "expected {k} initial values, got {}",
            init.len()
        )]));
    }
    check_input(u, horizon)?;
    let f = sys.underline();
    let alpha = sys.alpha();
    let mut pivot = Recursion::default();
    let mut rest = Recursion::default();
    for (op, c) in f.terms() {
        if op.d.count(alpha) > 0 {
            let d =
                op.d.subtract(&crate::multiindex::MultiIndex::single(alpha))
                    .expect("contains alpha");
            pivot.push(c, DeOp::new(d, op.e.clone()));
        } else {
            rest.push(c, op.clone());
        }
    }
    let shape = Shape::new(&[&pivot, &rest]);
    let mut y = Signal::new(init.iter().take(horizon).cloned().collect());
    for t in k..horizon {
        let tau = (t + alpha as usize) as i64;
        let w = shape.window(&y, u, tau);
        let p = pivot.eval(&shape, &w);
        if p.is_zero() {
            return Err(Error::ZeroPivot { t });
        }
        y.push(Q::new(-rest.eval(&shape, &w), p));
    }
    Ok(Trace {
        inputs: Signal::new(u.values[..horizon].to_vec()),
        outputs: y,
        horizon,
    })
}

/// Terms with integer coefficients, all scaled by one common denominator.
#[derive(Default)]
struct Recursion {
    terms: Vec<(Q, DeOp)>,
}

impl Recursion {
    fn push(&mut self, c: &Q, op: DeOp) {
        self.terms.push((c.clone(), op));
    }

    /// The sum times `coeff_den * Dy^ay * Du^bu`, an integer.
    fn eval(&self, shape: &Shape, w: &Window) -> BigInt {
        let mut acc = BigInt::zero();
        'terms: for (c, op) in &self.terms {
            let mut v = c.numer() * (&shape.coeff_den / c.denom());
            for &i in op.d.elems() {
                match &w.y[i as usize] {
                    Some(x) => v *= x,
                    None => continue 'terms,
                }
            }
            for &j in op.e.elems() {
                match &w.u[j as usize] {
                    Some(x) => v *= x,
                    None => continue 'terms,
                }
            }
            v *= &w.y_pow[shape.ay - op.d.len()];
            v *= &w.u_pow[shape.bu - op.e.len()];
            acc += v;
        }
        acc
    }
}

struct Shape {
    coeff_den: BigInt,
    y_delays: Vec<u32>,
    u_delays: Vec<u32>,
    ay: usize,
    bu: usize,
}

/// Past values at `tau`, scaled to integers over shared denominators.
struct Window {
    y: Vec<Option<BigInt>>,
    u: Vec<Option<BigInt>>,
    y_pow: Vec<BigInt>,
    u_pow: Vec<BigInt>,
}

impl Shape {
    fn new(parts: &[&Recursion]) -> Shape {
        let terms = || parts.iter().flat_map(|r| r.terms.iter());
        let mut y_delays: Vec<u32> = terms().flat_map(|(_, o)| o.d.elems().to_vec()).collect();
        let mut u_delays: Vec<u32> = terms().flat_map(|(_, o)| o.e.elems().to_vec()).collect();
        y_delays.sort_unstable();
        y_delays.dedup();
        u_delays.sort_unstable();
        u_delays.dedup();
        Shape {
            coeff_den: common_denominator(terms().map(|(c, _)| c)),
            ay: terms().map(|(_, o)| o.d.len()).max().unwrap_or(0),
            bu: terms().map(|(_, o)| o.e.len()).max().unwrap_or(0),
            y_delays,
            u_delays,
        }
    }

    fn window(&self, y: &Signal, u: &Signal, tau: i64) -> Window {
        let (ys, y_den) = scale(y, &self.y_delays, tau);
        let (us, u_den) = scale(u, &self.u_delays, tau);
        Window {
            y: ys,
            u: us,
            y_pow: powers(&y_den, self.ay),
            u_pow: powers(&u_den, self.bu),
        }
    }
}

fn common_denominator<'a>(qs: impl Iterator<Item = &'a Q>) -> BigInt {
    let mut d = BigInt::one();
    for q in qs {
        let qd = q.denom();
        if !(&d % qd).is_zero() {
            d = if (qd % &d).is_zero() {
                qd.clone()
            } else {
                d.lcm(qd)
            };
        }
    }
    d
}

fn scale(x: &Signal, delays: &[u32], tau: i64) -> (Vec<Option<BigInt>>, BigInt) {
    let vals: Vec<Option<&Q>> = delays.iter().map(|&i| x.at(tau - i as i64)).collect();
    let den = common_denominator(vals.iter().rev().flatten().copied());
    let width = delays.last().map_or(0, |&m| m as usize + 1);
    let mut out = vec![None; width];
    for (&i, v) in delays.iter().zip(&vals) {
        out[i as usize] = v.map(|q| q.numer() * (&den / q.denom()));
    }
    (out, den)
}

fn powers(d: &BigInt, n: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::one()];
    for k in 0..n {
        let next = &out[k] * d;
        out.push(next);
    }
    out
}

/// `L y = M u` solved for the lowest-delay output term.
pub fn simulate_linear(ls: &LinearSystem, u: &Signal, init: &[Q], horizon: usize) -> Result<Trace> {
    let l = &ls.l;
    let beta = l.min_delay().ok_or(Error::ZeroPivot { t: 0 })?;
    let k = ls.order();
    if init.len() != k {
        return Err(Error::InvalidSystem(vec![format!(
            "expected {k} initial values, got {}",
            init.len()
        )]));
    }
    check_input(u, horizon)?;
    let lead = l.coeff(beta);
    let mut y = Signal::new(init.iter().take(horizon).cloned().collect());
    for t in k..horizon {
        let tau = t as i64 + beta as i64;
        let mut acc = Q::zero();
        for (j, c) in ls.m.coeffs() {
            if let Some(v) = u.at(tau - *j as i64) {
                acc += c * v;
            }
        }
        for (d, c) in l.coeffs() {
            if *d == beta {
                continue;
            }
            if let Some(v) = y.at(tau - *d as i64) {
                acc -= c * v;
            }
        }
        y.push(acc / &lead);
    }
    Ok(Trace {
        inputs: Signal::new(u.values[..horizon].to_vec()),
        outputs: y,
        horizon,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// First `(trial, t)` where the nonlinear output `y` and linear output
/// `y_star` differ.
#[derive(Clone, Debug, PartialEq)]
pub struct Divergence {
    pub trial: usize,
    pub t: usize,
    pub y: Q,
    pub y_star: Q,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub verdict: Verdict,
    pub trials: usize,
    pub horizon: usize,
    pub seed: u64,
    pub redraws: usize,
    pub divergence: Option<Divergence>,
    /// `(u, y_nonlinear, y_linear)` of the divergent trial, else of trial 0.
    pub witness: Option<(Signal, Signal, Signal)>,
    pub note: Option<String>,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> Value {
        json!({
            "verdict": self.verdict.as_str(),
            "trials": self.trials,
            "horizon": self.horizon,
            "seed": self.seed,
            "redraws": self.redraws,
            "divergence": self.divergence.as_ref().map(|d| json!({
                "trial": d.trial,
                "t": d.t,
                "y": d.y.to_string(),
                "y_star": d.y_star.to_string(),
            })),
            "note": self.note,
        })
    }

    /// `t,u,y_nonlinear,y_linear,equal`, plus decimal columns if requested.
    pub fn witness_csv(&self, decimals: Option<usize>) -> Option<String> {
        let (u, y, ys) = self.witness.as_ref()?;
        Some(trace_csv(u, y, ys, decimals))
    }
}

pub fn trace_csv(u: &Signal, y: &Signal, ys: &Signal, decimals: Option<usize>) -> String {
    let mut s = String::from("t,u,y_nonlinear,y_linear,equal");
    if decimals.is_some() {
        s.push_str(",u_decimal,y_nonlinear_decimal,y_linear_decimal");
    }
    s.push('\n');
    let n = y.len().min(ys.len());
    for t in 0..n {
        let (a, b) = (&y.values[t], &ys.values[t]);
        s.push_str(&format!("{t},{},{a},{b},{}", u.value(t as i64), a == b));
        if let Some(k) = decimals {
            s.push_str(&format!(
                ",{},{},{}",
                to_decimal(&u.value(t as i64), k),
                to_decimal(a, k),
                to_decimal(b, k)
            ));
        }
        s.push('\n');
    }
    s
}

pub fn single_trace_csv(tr: &Trace, decimals: Option<usize>) -> String {
    let mut s = String::from("t,u,y");
    if decimals.is_some() {
        s.push_str(",u_decimal,y_decimal");
    }
    s.push('\n');
    for t in 0..tr.outputs.len() {
        let (u, y) = (tr.inputs.value(t as i64), &tr.outputs.values[t]);
        s.push_str(&format!("{t},{u},{y}"));
        if let Some(k) = decimals {
            s.push_str(&format!(",{},{}", to_decimal(&u, k), to_decimal(y, k)));
        }
        s.push('\n');
    }
    s
}

/// Runs both systems on the same input with matched initial conditions:
/// the system needing fewer initial values starts from `sys.init`, and the
/// other one takes its first outputs as initial values.
fn run_pair(
    sys: &DiscreteSystem,
    ls: &LinearSystem,
    u: &Signal,
    horizon: usize,
) -> Result<(Signal, Signal)> {
    let (k_nl, k_lin) = (sys.order(), ls.order());
    if k_lin <= k_nl {
        let lin = simulate_linear(ls, u, &sys.init[..k_lin.min(sys.init.len())], horizon)?;
        let init: Vec<Q> = (0..k_nl).map(|t| lin.outputs.value(t as i64)).collect();
        let nl = simulate_nonlinear_from(sys, u, &init, horizon)?;
        Ok((nl.outputs, lin.outputs))
    } else {
        let nl = simulate_nonlinear(sys, u, horizon)?;
        let init: Vec<Q> = (0..k_lin).map(|t| nl.outputs.value(t as i64)).collect();
        let lin = simulate_linear(ls, u, &init, horizon)?;
        Ok((nl.outputs, lin.outputs))
    }
}

pub fn certify_equivalence(
    sys: &DiscreteSystem,
    ls: &LinearSystem,
    trials: usize,
    horizon: usize,
    seed: u64,
) -> Result<Certificate> {
    if sys.init.len() != sys.order() {
        return Err(Error::InvalidSystem(sys.validate()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cert = Certificate {
        verdict: Verdict::Pass,
        trials,
        horizon,
        seed,
        redraws: 0,
        divergence: None,
        witness: None,
        note: None,
    };
    for trial in 0..trials {
        let mut attempt = 0;
        let (u, y, ys) = loop {
            let u = random_input(&mut rng, horizon);
            match run_pair(sys, ls, &u, horizon) {
                Ok((y, ys)) => break (u, y, ys),
                Err(Error::ZeroPivot { t }) => {
                    attempt += 1;
                    cert.redraws += 1;
                    if attempt > REDRAW_CAP {
                        cert.verdict = Verdict::Inconclusive;
                        cert.note = Some(format!(
                            "trial {trial}: zero pivot at t = {t} on {attempt} draws"
                        ));
                        return Ok(cert);
                    }
                }
                Err(e) => return Err(e),
            }
        };
        let first = (0..horizon).find(|&t| y.values[t] != ys.values[t]);
        if let Some(t) = first {
            cert.verdict = Verdict::Fail;
            cert.divergence = Some(Divergence {
                trial,
                t,
                y: y.values[t].clone(),
                y_star: ys.values[t].clone(),
            });
            cert.witness = Some((u, y, ys));
            return Ok(cert);
        }
        if trial == 0 {
            cert.witness = Some((u, y, ys));
        }
    }
    Ok(cert)
}
