use thiserror::Error;

use crate::linearize::LinearizationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{sub} is not a sub-multiset of {of}")]
    NotASubindex { sub: String, of: String },

    #[error("shifting {index} by {shift} gives a negative delay")]
    NegativeDelay { index: String, shift: i64 },

    #[error("input has linear or constant terms: {0}")]
    InputHasLinearTerms(String),

    #[error("maximum term did not decrease: {previous} then {current}")]
    NonTerminating { previous: String, current: String },

    #[error("internal consistency: {0}")]
    Internal(String),

    #[error("{num} is not divisible by {den}; remainder {remainder}")]
    NotDivisible {
        num: String,
        den: String,
        remainder: String,
    },

    #[error("zero pivot at t = {t}")]
    ZeroPivot { t: usize },

    #[error("invalid system: {}", .0.join("; "))]
    InvalidSystem(Vec<String>),

    #[error("parse error at line {line}, column {column}: {message} (expected {})", .expected.join(", "))]
    Parse {
        line: usize,
        column: usize,
        message: String,
        expected: Vec<String>,
    },

    #[error("semantic error: {0}")]
    Semantic(String),

    #[error("bad rule set: {0}")]
    RuleSet(String),

    #[error("the method fails: no admissible rule set found")]
    MethodFails(Box<LinearizationReport>),

    #[error("not a linear system: {0}")]
    NotLinear(String),
}
