//! Degree-cap expansion.
//!
//! Hardware and some heuristics only accept instances whose interaction
//! graph has bounded degree. This module rewrites an instance so that no
//! variable touches more than `cap` others, by splitting busy variables
//! into chains of copies. Each copy is tied to its predecessor with a
//! penalized coupling so that, at any optimum, the whole chain agrees
//! with the original variable; excess edges are then re-homed onto the
//! copies.
//!
//! The coupling between `i` and its copy `k` adds `M (x_i - 2 x_i x_k + x_k)`
//! for a negative penalty `M`: zero when the two agree, `M` (a loss, since
//! we maximize) when they disagree. `default_penalty` chooses an `M` large
//! enough that no relocated edge can ever pay for a disagreement.

use std::collections::BTreeMap;

use crate::instance::QuboInstance;
use crate::Error;

/// One chain of copies standing in for an over-degree original variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopyChain {
    /// The original variable the chain extends.
    pub original: usize,
    /// Added copies in chain order; each couples to the previous member
    /// (the first couples to `original`).
    pub added: Vec<usize>,
}

impl CopyChain {
    /// All members, original first, in coupling order.
    pub fn members(&self) -> Vec<usize> {
        let mut m = Vec::with_capacity(1 + self.added.len());
        m.push(self.original);
        m.extend_from_slice(&self.added);
        m
    }
}

/// One off-diagonal entry re-homed from a chain member onto the next copy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MovedEdge {
    /// Copy that now carries the entry.
    pub to: usize,
    /// Unchanged far endpoint.
    pub neighbor: usize,
    /// Coefficient value, carried over verbatim.
    pub value: i64,
}

/// Record of a degree-cap expansion, sufficient to undo it and to map
/// assignments between the two instances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionLog {
    /// Variable count before expansion.
    pub original_n: usize,
    /// Degree bound that was enforced.
    pub cap: usize,
    /// Coupling penalty used for every chain link.
    pub penalty: i64,
    /// One chain per variable that exceeded the cap.
    pub chains: Vec<CopyChain>,
    /// Every relocated entry, in the order the moves happened.
    pub moved: Vec<MovedEdge>,
}

impl ExpansionLog {
    /// Variable count after expansion.
    pub fn expanded_n(&self) -> usize {
        self.original_n + self.chains.iter().map(|c| c.added.len()).sum::<usize>()
    }

    /// Maps an expanded assignment back to the original variables by
    /// dropping the copies. Faithful whenever the chains agree, which
    /// holds at any optimum under an adequate penalty.
    pub fn project_assignment(&self, assignment: &[u8]) -> Result<Vec<u8>, Error> {
        if assignment.len() != self.expanded_n() {
            return Err(Error::LengthMismatch { expected: self.expanded_n(), got: assignment.len() });
        }
        Ok(assignment[..self.original_n].to_vec())
    }

    /// True when every copy agrees with its chain's original variable.
    pub fn chains_agree(&self, assignment: &[u8]) -> Result<bool, Error> {
        if assignment.len() != self.expanded_n() {
            return Err(Error::LengthMismatch { expected: self.expanded_n(), got: assignment.len() });
        }
        for chain in &self.chains {
            let v = assignment[chain.original];
            if chain.added.iter().any(|&k| assignment[k] != v) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Penalty that provably preserves optima: `-(1 + sum of |c|)`. Violating
/// even one coupling then costs more than the entire instance can repay.
pub fn default_penalty(inst: &QuboInstance) -> Result<i64, Error> {
    let total = inst.magnitude_sum()?;
    total.checked_add(1).and_then(i64::checked_neg).ok_or(Error::Overflow)
}

/// Couples variable `i` to a fresh copy, returning the new instance and the
/// copy's index. Adds `penalty` to `c_ii`, sets the copy's diagonal to
/// `penalty` and the pair coefficient to `-2 * penalty`. The penalty must be
/// negative.
pub fn strong_couple(
    inst: &QuboInstance,
    i: usize,
    penalty: i64,
) -> Result<(QuboInstance, usize), Error> {
    if i >= inst.num_variables() {
        return Err(Error::IndexOutOfRange { index: i, n: inst.num_variables() });
    }
    let mut out = inst.clone();
    let k = couple_in_place(&mut out, i, penalty)?;
    Ok((out, k))
}

/// In-place body of `strong_couple`; shared with the cap enforcement loop.
fn couple_in_place(inst: &mut QuboInstance, i: usize, penalty: i64) -> Result<usize, Error> {
    if penalty >= 0 {
        return Err(Error::NonNegativePenalty { penalty });
    }
    let pair = penalty.checked_mul(-2).ok_or(Error::Overflow)?;
    inst.add_linear(i, penalty)?;
    let k = inst.push_variable();
    inst.set_linear(k, penalty);
    inst.set_quadratic(i, k, pair)?;
    Ok(k)
}

/// Rewrites `inst` so that every variable's degree is at most `cap`, using
/// `default_penalty` for the chain couplings.
///
/// A cap below 2 cannot host a chain link plus any payload. A cap of
/// exactly 2 only works when the instance already satisfies it: each copy
/// spends one edge on its predecessor and one on its successor, leaving no
/// room to take over payload, so a degree-3 variable can never be split
/// down to 2.
pub fn enforce_degree_cap(
    inst: &QuboInstance,
    cap: usize,
) -> Result<(QuboInstance, ExpansionLog), Error> {
    let penalty = default_penalty(inst)?;
    enforce_degree_cap_with(inst, cap, penalty)
}

/// Same as `enforce_degree_cap` with an explicit coupling penalty. A penalty
/// weaker than `default_penalty` may change the optimum: a copy carrying
/// attractive relocated edges can afford to disagree with its original.
pub fn enforce_degree_cap_with(
    inst: &QuboInstance,
    cap: usize,
    penalty: i64,
) -> Result<(QuboInstance, ExpansionLog), Error> {
    if cap < 2 {
        return Err(Error::CapTooSmall { cap });
    }
    if penalty >= 0 {
        return Err(Error::NonNegativePenalty { penalty });
    }
    let n = inst.num_variables();
    if cap == 2 {
        for i in 0..n {
            if inst.degree(i) > 2 {
                return Err(Error::CapInfeasible { index: i, degree: inst.degree(i) });
            }
        }
    }

    let mut work = inst.clone();
    let mut chains = Vec::new();
    let mut moved = Vec::new();

    // Splitting a row only ever lowers its own degree and leaves every
    // other original row's degree unchanged (relocated edges keep their far
    // endpoint), so one ascending sweep settles the whole instance.
    for i in 0..n {
        if work.degree(i) <= cap {
            continue;
        }
        let mut chain = Vec::new();
        let mut tail = i;
        // Coupling partners of the current tail; these edges must stay put.
        let mut prev: Option<usize> = None;
        while work.degree(tail) > cap {
            let k = couple_in_place(&mut work, tail, penalty)?;
            let excess = work.degree(tail) - cap;
            // Highest-index payload entries migrate; coupling edges do not.
            let mut payload: Vec<(usize, i64)> = work
                .row(tail)
                .filter(|&(j, _)| Some(j) != prev && j != k)
                .collect();
            payload.sort_by_key(|&(j, _)| std::cmp::Reverse(j));
            for &(j, value) in payload.iter().take(excess) {
                work.set_quadratic(tail, j, 0)?;
                work.set_quadratic(k, j, value)?;
                moved.push(MovedEdge { to: k, neighbor: j, value });
            }
            chain.push(k);
            prev = Some(tail);
            tail = k;
        }
        chains.push(CopyChain { original: i, added: chain });
    }

    let log = ExpansionLog { original_n: n, cap, penalty, chains, moved };
    debug_assert_eq!(log.expanded_n(), work.num_variables());
    Ok((work, log))
}

/// Reverses an expansion, recovering the original instance. The log must
/// belong to `expanded`; structural mismatches are reported as errors.
pub fn undo_expansion(expanded: &QuboInstance, log: &ExpansionLog) -> Result<QuboInstance, Error> {
    if expanded.num_variables() != log.expanded_n() {
        return Err(Error::LengthMismatch {
            expected: log.expanded_n(),
            got: expanded.num_variables(),
        });
    }
    // Chain predecessor of every added copy.
    let mut pred: BTreeMap<usize, usize> = BTreeMap::new();
    for chain in &log.chains {
        let mut p = chain.original;
        for &k in &chain.added {
            if k < log.original_n || pred.insert(k, p).is_some() {
                return Err(Error::BadConfig(format!("copy index {k} is invalid")));
            }
            p = k;
        }
    }
    let expected: Vec<usize> = (log.original_n..log.expanded_n()).collect();
    if pred.keys().copied().collect::<Vec<_>>() != expected {
        return Err(Error::BadConfig("copy indices do not tile the added range".into()));
    }

    let mut work = expanded.clone();
    // Peel copies from the top so each removal targets the last variable.
    for (&k, &p) in pred.iter().rev() {
        let entries = work.clear_row(k);
        let mut saw_coupling = false;
        for (j, value) in entries {
            if j == p {
                // The coupling link itself; its diagonal contribution on the
                // predecessor is rolled back instead of re-homed.
                if value != log.penalty.checked_mul(-2).ok_or(Error::Overflow)? {
                    return Err(Error::BadConfig(format!(
                        "coupling {p}-{k} has value {value}, not the logged penalty"
                    )));
                }
                saw_coupling = true;
            } else {
                if work.quadratic(p, j) != 0 {
                    return Err(Error::BadConfig(format!(
                        "cannot re-home {k}-{j}: predecessor {p} already holds that edge"
                    )));
                }
                work.set_quadratic(p, j, value)?;
            }
        }
        if !saw_coupling {
            return Err(Error::BadConfig(format!("copy {k} is not coupled to {p}")));
        }
        work.add_linear(p, log.penalty.checked_neg().ok_or(Error::Overflow)?)?;
        work.set_linear(k, 0);
        work.pop_variable()?;
    }
    Ok(work)
}
