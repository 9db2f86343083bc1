//! Slack analysis for the fixing rules.
//!
//! When rule 1 or rule 2 determines a variable, the determination survives
//! some amount of coefficient drift. The slack of a row measures that
//! margin exactly: rule 1 keeps firing until the row's diagonal-plus-
//! negative-sum drops below zero, rule 2 until the diagonal-plus-positive-
//! sum climbs above it. The margin doubles as a shared budget: any mix of
//! single-coefficient changes whose total stays within the slack preserves
//! the determination, and a total of slack plus one breaks it.

use std::collections::BTreeMap;

use crate::instance::QuboInstance;
use crate::reduce::Rule;
use crate::Error;

/// Sums of the positive and negative off-diagonal coefficients of row `i`.
fn row_sums(inst: &QuboInstance, i: usize) -> (i64, i64) {
    let mut pos = 0;
    let mut neg = 0;
    for (_, v) in inst.row(i) {
        if v > 0 {
            pos += v;
        } else {
            neg += v;
        }
    }
    (pos, neg)
}

/// Margin by which rule 1 holds for variable `i`: `c_ii` plus the row's
/// negative coefficient sum. Nonnegative exactly when rule 1 fires; when
/// negative, its magnitude is the diagonal increase that would make it fire.
///
/// Panics if `i` is out of range.
pub fn rule1_slack(inst: &QuboInstance, i: usize) -> i64 {
    let (_, neg) = row_sums(inst, i);
    inst.linear(i) + neg
}

/// Margin by which rule 2 holds for variable `i`: the negation of `c_ii`
/// plus the row's positive coefficient sum. Nonnegative exactly when rule 2
/// fires.
///
/// Panics if `i` is out of range.
pub fn rule2_slack(inst: &QuboInstance, i: usize) -> i64 {
    let (pos, _) = row_sums(inst, i);
    -(inst.linear(i) + pos)
}

/// Drift tolerance of one determined row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlackReport {
    pub variable: usize,
    /// Which rule the margin belongs to; only `R1` and `R2` occur.
    pub rule: Rule,
    /// Nonnegative margin before the determination is lost.
    pub slack: i64,
    /// Allowable change per off-diagonal coefficient: a decrease for the
    /// negative coefficients of an `R1` row, an increase for the positive
    /// coefficients of an `R2` row. Each bound equals the row slack, since
    /// one coefficient can absorb the whole budget.
    pub per_coefficient: BTreeMap<usize, i64>,
}

/// Builds the slack report for variable `i`, preferring rule 1 when both
/// rules happen to hold. Returns `None` for undetermined rows.
///
/// Panics if `i` is out of range.
pub fn slack_report(inst: &QuboInstance, i: usize) -> Option<SlackReport> {
    let s1 = rule1_slack(inst, i);
    if s1 >= 0 {
        let per = inst.row(i).filter(|&(_, v)| v < 0).map(|(j, _)| (j, s1)).collect();
        return Some(SlackReport { variable: i, rule: Rule::R1, slack: s1, per_coefficient: per });
    }
    let s2 = rule2_slack(inst, i);
    if s2 >= 0 {
        let per = inst.row(i).filter(|&(_, v)| v > 0).map(|(j, _)| (j, s2)).collect();
        return Some(SlackReport { variable: i, rule: Rule::R2, slack: s2, per_coefficient: per });
    }
    None
}

/// Total decrease, spread across any of row `i`'s negative coefficients,
/// that keeps rule 1 firing. Requires rule 1 to currently hold.
pub fn total_allowable_change(inst: &QuboInstance, i: usize) -> Result<i64, Error> {
    if i >= inst.num_variables() {
        return Err(Error::IndexOutOfRange { index: i, n: inst.num_variables() });
    }
    let slack = rule1_slack(inst, i);
    if slack < 0 {
        return Err(Error::RuleDoesNotHold { rule: "rule 1", index: i });
    }
    Ok(slack)
}
