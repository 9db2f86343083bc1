//! Preprocessing toolkit for unconstrained binary quadratic optimization.
//!
//! The centerpiece is a fixpoint reduction pass that fixes variables whose
//! optimal value can be read off their row coefficients, shrinking instances
//! before they reach a solver. Around it sit the supporting pieces a
//! preprocessing workflow needs:
//!
//! * [`instance`]: sparse symmetric storage and evaluation,
//! * [`reduce`]: persistency-based variable fixing and solution lifting,
//! * [`expand`]: degree caps via penalty-coupled auxiliary variables,
//! * [`sensitivity`]: how far coefficients can move before a fixing breaks,
//! * [`generate`]: reproducible random instances with heavy-tailed knobs,
//! * [`design`]: a 16-run screening design over the generator factors,
//! * [`solve`]: exact enumeration and one-flip tabu search references,
//! * [`format`]: the plain-text instance, report, and solution formats.
//!
//! The objective convention is maximization throughout. Coefficients are
//! `i64` and all arithmetic on them is overflow-checked.

pub mod design;
pub mod expand;
pub mod format;
pub mod generate;
pub mod instance;
pub mod ising;
pub mod reduce;
pub mod sensitivity;
pub mod solve;

#[cfg(test)]
pub(crate) mod testhelp;

pub use instance::{QuboInstance, RowAggregates, Solution};

use std::fmt;

/// Errors reported by instance construction, the preprocessing passes, the
/// solvers, and the text formats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Variable index at or beyond the instance size.
    IndexOutOfRange { index: usize, n: usize },
    /// Off-diagonal entry given with `i > j`.
    UnorderedPair { i: usize, j: usize },
    /// Quadratic coefficient on a diagonal position.
    SelfPair { i: usize },
    /// Position written twice.
    DuplicateEntry { i: usize, j: usize },
    /// Explicit zero where only nonzero entries are stored.
    ZeroEntry { i: usize, j: usize },
    /// Assignment length does not match the instance.
    LengthMismatch { expected: usize, got: usize },
    /// Assignment holds a value other than 0 or 1.
    NotBinary { value: u8 },
    /// A coefficient sum left the `i64` range.
    Overflow,
    /// Operation on a row that an earlier fixing removed.
    DeadRow { index: usize },
    /// Rule application requested where the rule does not hold.
    RuleDoesNotHold { rule: &'static str, index: usize },
    /// Enumeration requested beyond the exact-solver size cap.
    TooLarge { n: usize, limit: usize },
    /// The same variable fixed to both values.
    ConflictingFixes { index: usize },
    /// Penalty weight must be strictly negative.
    NonNegativePenalty { penalty: i64 },
    /// Degree cap below the smallest workable value.
    CapTooSmall { cap: usize },
    /// A degree cap of 2 cannot host a node of this degree.
    CapInfeasible { index: usize, degree: usize },
    /// Generator or search parameters outside their documented ranges.
    BadConfig(String),
    /// Text input rejected at a specific 1-based line.
    Parse { line: usize, message: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::IndexOutOfRange { index, n } => {
                write!(f, "variable index {index} out of range for {n} variables")
            }
            Error::UnorderedPair { i, j } => {
                write!(f, "entry ({i}, {j}) not in upper-triangular order")
            }
            Error::SelfPair { i } => write!(f, "quadratic entry on diagonal position ({i}, {i})"),
            Error::DuplicateEntry { i, j } => write!(f, "duplicate entry ({i}, {j})"),
            Error::ZeroEntry { i, j } => write!(f, "zero off-diagonal entry ({i}, {j})"),
            Error::LengthMismatch { expected, got } => {
                write!(f, "assignment length {got}, instance has {expected} variables")
            }
            Error::NotBinary { value } => write!(f, "assignment value {value} is not 0 or 1"),
            Error::Overflow => write!(f, "coefficient arithmetic overflowed i64"),
            Error::DeadRow { index } => write!(f, "variable {index} was already fixed"),
            Error::RuleDoesNotHold { rule, index } => {
                write!(f, "{rule} does not hold at variable {index}")
            }
            Error::TooLarge { n, limit } => {
                write!(f, "exact enumeration limited to {limit} variables, got {n}")
            }
            Error::ConflictingFixes { index } => {
                write!(f, "variable {index} fixed to both 0 and 1")
            }
            Error::NonNegativePenalty { penalty } => {
                write!(f, "penalty weight must be negative, got {penalty}")
            }
            Error::CapTooSmall { cap } => write!(f, "degree cap must be at least 2, got {cap}"),
            Error::CapInfeasible { index, degree } => write!(
                f,
                "degree cap 2 admits at most 2 retained edges per coupled group, \
                 variable {index} has degree {degree}"
            ),
            Error::BadConfig(msg) => write!(f, "{msg}"),
            Error::Parse { line, message } => write!(f, "line {line}: {message}"),
        }
    }
}

impl std::error::Error for Error {}
