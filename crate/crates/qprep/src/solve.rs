//! Reference solvers: exact enumeration for oracle-sized instances and a
//! one-flip tabu search for everything larger.

use std::time::{Duration, Instant};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::{Error, QuboInstance, Solution};

/// Hard cap on exact enumeration size; `2^25` states finish in seconds with
/// incremental objective updates, the next doubling does not.
pub const ENUMERATION_LIMIT: usize = 25;

/// Result of an exhaustive scan of the assignment space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    /// Lexicographically smallest optimal assignment and the optimal value.
    pub solution: Solution,
    /// Number of distinct assignments attaining the optimum.
    pub optimum_count: u64,
}

/// Enumerates every assignment and returns the optimum.
///
/// Walks the space in Gray-code order so each step flips one variable and
/// updates the objective in `O(degree)`.
pub fn brute_force(inst: &QuboInstance) -> Result<Enumeration, Error> {
    let n = inst.num_variables();
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { n, limit: ENUMERATION_LIMIT });
    }
    inst.magnitude_sum()?;
    let free: Vec<usize> = (0..n).collect();
    Ok(enumerate(inst, vec![0; n], &free))
}

/// Enumerates only assignments honoring `fixes`, a list of
/// `(variable, value)` pairs, and returns the constrained optimum.
///
/// Repeating a fix is allowed; fixing a variable to both values is an error.
pub fn brute_force_constrained(
    inst: &QuboInstance,
    fixes: &[(usize, u8)],
) -> Result<Enumeration, Error> {
    let n = inst.num_variables();
    inst.magnitude_sum()?;
    let mut fixed: Vec<Option<u8>> = vec![None; n];
    for &(i, value) in fixes {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        if value > 1 {
            return Err(Error::NotBinary { value });
        }
        match fixed[i] {
            Some(prev) if prev != value => return Err(Error::ConflictingFixes { index: i }),
            _ => fixed[i] = Some(value),
        }
    }
    let free: Vec<usize> = (0..n).filter(|&i| fixed[i].is_none()).collect();
    if free.len() > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { n: free.len(), limit: ENUMERATION_LIMIT });
    }
    let base: Vec<u8> = fixed.iter().map(|f| f.unwrap_or(0)).collect();
    Ok(enumerate(inst, base, &free))
}

// Gray-code walk over the `free` positions starting from `base`. The flipped
// position at step t is free[trailing_zeros(t)].
fn enumerate(inst: &QuboInstance, base: Vec<u8>, free: &[usize]) -> Enumeration {
    let mut x = base;
    let mut value = inst
        .evaluate(&x)
        .expect("base assignment is valid and magnitudes were checked");
    let mut best = value;
    let mut best_x = x.clone();
    let mut count: u64 = 1;

    for t in 1..(1u64 << free.len()) {
        let i = free[t.trailing_zeros() as usize];
        value += flip_gain(inst, &x, i);
        x[i] ^= 1;
        if value > best {
            best = value;
            best_x.copy_from_slice(&x);
            count = 1;
        } else if value == best {
            count += 1;
            if x < best_x {
                best_x.copy_from_slice(&x);
            }
        }
    }
    Enumeration { solution: Solution { assignment: best_x, objective: best }, optimum_count: count }
}

// Objective change from flipping variable i in assignment x.
fn flip_gain(inst: &QuboInstance, x: &[u8], i: usize) -> i64 {
    let mut row_sum = inst.linear(i);
    for (j, v) in inst.row(i) {
        if x[j] == 1 {
            row_sum += v;
        }
    }
    if x[i] == 0 {
        row_sum
    } else {
        -row_sum
    }
}

/// Parameters for [`tabu_search`]. At least one of the two stopping limits
/// must be set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TabuParams {
    pub max_iterations: Option<u64>,
    pub time_limit: Option<Duration>,
    /// Base number of iterations a flipped variable stays tabu.
    pub tenure: u32,
    /// Seeds the small random component added to the tenure after each flip.
    pub seed: u64,
}

impl TabuParams {
    fn validate(&self) -> Result<(), Error> {
        if self.max_iterations.is_none() && self.time_limit.is_none() {
            return Err(Error::BadConfig(
                "tabu search needs an iteration or time limit".into(),
            ));
        }
        Ok(())
    }
}

/// One-flip tabu search from the all-zero assignment.
///
/// Keeps the flip gain of every variable current in `O(degree)` per move,
/// always takes the best admissible flip (ties to the lowest index), and lets
/// a tabu move through only when it would beat the best value seen. The
/// returned objective is recomputed with [`QuboInstance::evaluate`] on the
/// returned assignment.
pub fn tabu_search(inst: &QuboInstance, params: &TabuParams) -> Result<Solution, Error> {
    params.validate()?;
    inst.magnitude_sum()?;
    let n = inst.num_variables();
    if n == 0 {
        return Ok(Solution { assignment: Vec::new(), objective: 0 });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut x = vec![0u8; n];
    let mut gains: Vec<i64> = (0..n).map(|i| inst.linear(i)).collect();
    let mut tabu_until = vec![0u64; n];
    let mut current: i64 = 0;
    let mut best = current;
    let mut best_x = x.clone();

    let started = Instant::now();
    let max_iterations = params.max_iterations.unwrap_or(u64::MAX);
    let mut iter: u64 = 0;
    while iter < max_iterations {
        iter += 1;
        if let Some(limit) = params.time_limit {
            if iter % 64 == 0 && started.elapsed() >= limit {
                break;
            }
        }

        // Best admissible flip; a tabu flip is admissible only under the
        // aspiration that it improves on the best value seen so far.
        let mut chosen: Option<(usize, i64)> = None;
        let mut fallback: Option<(usize, i64)> = None;
        for i in 0..n {
            let gain = gains[i];
            if fallback.map_or(true, |(_, g)| gain > g) {
                fallback = Some((i, gain));
            }
            let admissible = tabu_until[i] <= iter || current + gain > best;
            if admissible && chosen.map_or(true, |(_, g)| gain > g) {
                chosen = Some((i, gain));
            }
        }
        let (i, gain) = chosen.or(fallback).expect("n > 0");

        current += gain;
        x[i] ^= 1;
        let sign: i64 = if x[i] == 1 { 1 } else { -1 };
        gains[i] = -gains[i];
        for (j, v) in inst.row(i) {
            gains[j] += sign * v * (1 - 2 * i64::from(x[j]));
        }
        let jitter = rng.gen_range(0..=u64::from(params.tenure / 4));
        tabu_until[i] = iter + u64::from(params.tenure) + jitter;

        if current > best {
            best = current;
            best_x.copy_from_slice(&x);
        }
    }

    let objective = inst.evaluate(&best_x)?;
    debug_assert_eq!(objective, best);
    Ok(Solution { assignment: best_x, objective })
}
