//! Exact algebra of δε-polynomials for causal single-input single-output
//! discrete systems, their formal factorization into linear-like factors,
//! and the search for linear systems with identical input/output behaviour.
//!
//! Delays are non-negative integers. Output delays live in the δ-part of an
//! operator and input delays in the ε-part, so `d0 d1 e2` stands for
//! `y(t) y(t-1) u(t-2)`.

pub mod depoly;
pub mod error;
pub mod factorize;
pub mod linearize;
pub mod multiindex;
pub mod operator;
pub mod parampoly;
pub mod parser;
pub mod rational;
pub mod simulate;
pub mod solve;
pub mod system;
mod upoly;

pub use depoly::{DePoly, Homogeneous, Kind, LinearPoly};
pub use error::{Error, Result};
pub use factorize::{evaluate, fdel_algorithm, fdel_subroutine, FactorTerm, Factorization};
pub use linearize::{
    linearize, linearize_cross, linearize_no_cross, linearize_with_rules, Algorithm, LinearSystem,
    LinearizationReport, LinearizeOptions, Solution,
};
pub use multiindex::MultiIndex;
pub use operator::{DeOp, Signal};
pub use parampoly::{ParamId, ParamKind, ParamPoly, RuleSet};
pub use parser::{parse_polynomial, parse_source, parse_system, Source};
pub use rational::Q;
pub use simulate::{
    certify_equivalence, simulate_linear, simulate_nonlinear, Certificate, Divergence, Trace,
    Verdict,
};
pub use solve::{
    hat_polynomial, linear_divide, linear_gcd, remainder_constraints, solve_successive,
    ConstraintEquation, ConstraintSystem, Family, SolveReport,
};
pub use system::DiscreteSystem;
