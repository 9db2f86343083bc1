//! Sparse symmetric storage for unconstrained binary quadratic programs.
//!
//! An instance is the maximization problem
//!
//! ```text
//! max  sum_i c[i][i] * x[i]  +  sum_{i<j} c[i][j] * x[i] * x[j],   x in {0,1}^n
//! ```
//!
//! Diagonal coefficients are the linear terms. Each off-diagonal pair is
//! stored once per unordered pair and counted once in the objective.

use std::collections::BTreeMap;

use crate::Error;

/// Symmetric integer coefficient matrix over binary variables.
///
/// Rows are adjacency maps, so looking up or updating a single coefficient is
/// `O(log degree)` and removing an entire row touches only its neighbors.
/// Off-diagonal zeros are never stored; writing a zero deletes the entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuboInstance {
    n: usize,
    diag: Vec<i64>,
    rows: Vec<BTreeMap<usize, i64>>,
}

impl QuboInstance {
    /// Creates an instance with `n` variables and all coefficients zero.
    pub fn new(n: usize) -> Self {
        QuboInstance {
            n,
            diag: vec![0; n],
            rows: vec![BTreeMap::new(); n],
        }
    }

    /// Builds an instance from `(i, j, value)` triples with `i <= j`.
    ///
    /// A triple with `i == j` sets a linear coefficient. Duplicate positions,
    /// out-of-range indices, `i > j`, and explicit zero off-diagonal entries
    /// are rejected.
    pub fn from_entries(n: usize, entries: &[(usize, usize, i64)]) -> Result<Self, Error> {
        let mut inst = QuboInstance::new(n);
        let mut diag_seen = vec![false; n];
        for &(i, j, value) in entries {
            if i >= n || j >= n {
                return Err(Error::IndexOutOfRange { index: i.max(j), n });
            }
            if i > j {
                return Err(Error::UnorderedPair { i, j });
            }
            if i == j {
                if diag_seen[i] {
                    return Err(Error::DuplicateEntry { i, j });
                }
                diag_seen[i] = true;
                inst.diag[i] = value;
            } else {
                if inst.rows[i].contains_key(&j) {
                    return Err(Error::DuplicateEntry { i, j });
                }
                if value == 0 {
                    return Err(Error::ZeroEntry { i, j });
                }
                inst.rows[i].insert(j, value);
                inst.rows[j].insert(i, value);
            }
        }
        Ok(inst)
    }

    /// Number of variables, including any whose row is entirely zero.
    pub fn num_variables(&self) -> usize {
        self.n
    }

    /// Linear coefficient of variable `i`.
    pub fn linear(&self, i: usize) -> i64 {
        self.diag[i]
    }

    /// Sets the linear coefficient of variable `i`.
    pub fn set_linear(&mut self, i: usize, value: i64) {
        self.diag[i] = value;
    }

    /// Adds `delta` to the linear coefficient of variable `i`.
    pub fn add_linear(&mut self, i: usize, delta: i64) -> Result<(), Error> {
        self.diag[i] = self.diag[i].checked_add(delta).ok_or(Error::Overflow)?;
        Ok(())
    }

    /// Quadratic coefficient of the unordered pair `{i, j}`, zero if absent.
    pub fn quadratic(&self, i: usize, j: usize) -> i64 {
        self.rows[i].get(&j).copied().unwrap_or(0)
    }

    /// Sets the coefficient of `{i, j}` and returns the previous value.
    ///
    /// Writing zero removes the entry. Self-pairs are rejected; use
    /// [`set_linear`](Self::set_linear) for diagonal terms.
    pub fn set_quadratic(&mut self, i: usize, j: usize, value: i64) -> Result<i64, Error> {
        if i == j {
            return Err(Error::SelfPair { i });
        }
        if i >= self.n || j >= self.n {
            return Err(Error::IndexOutOfRange { index: i.max(j), n: self.n });
        }
        let old = if value == 0 {
            let old = self.rows[i].remove(&j).unwrap_or(0);
            self.rows[j].remove(&i);
            old
        } else {
            self.rows[j].insert(i, value);
            self.rows[i].insert(j, value).unwrap_or(0)
        };
        Ok(old)
    }

    /// Off-diagonal entries of row `i` as `(neighbor, value)` in ascending
    /// neighbor order.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.rows[i].iter().map(|(&j, &v)| (j, v))
    }

    /// Number of off-diagonal entries in row `i`.
    pub fn degree(&self, i: usize) -> usize {
        self.rows[i].len()
    }

    /// Number of stored unordered off-diagonal pairs.
    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(BTreeMap::len).sum::<usize>() / 2
    }

    /// Number of entries a file representation carries: nonzero diagonal
    /// coefficients plus stored off-diagonal pairs.
    pub fn entry_count(&self) -> usize {
        self.diag.iter().filter(|&&v| v != 0).count() + self.edge_count()
    }

    /// All stored entries as `(i, j, value)` with `i <= j`, ascending by
    /// `(i, j)`. Zero diagonal coefficients are skipped.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let diag = (self.diag[i] != 0).then_some((i, i, self.diag[i]));
            let upper = self.rows[i]
                .range(i + 1..)
                .map(move |(&j, &v)| (i, j, v));
            diag.into_iter().chain(upper)
        })
    }

    /// Appends a fresh variable with an all-zero row, returning its index.
    pub fn push_variable(&mut self) -> usize {
        self.diag.push(0);
        self.rows.push(BTreeMap::new());
        self.n += 1;
        self.n - 1
    }

    /// Removes the last variable. Its row must already be entirely zero.
    pub fn pop_variable(&mut self) -> Result<(), Error> {
        match self.diag.last() {
            None => Err(Error::IndexOutOfRange { index: 0, n: 0 }),
            Some(&d) if d != 0 || !self.rows[self.n - 1].is_empty() => {
                Err(Error::BadConfig(format!("variable {} still has coefficients", self.n - 1)))
            }
            Some(_) => {
                self.diag.pop();
                self.rows.pop();
                self.n -= 1;
                Ok(())
            }
        }
    }

    /// Removes every off-diagonal entry of row `i` and zeroes its diagonal.
    ///
    /// Returns the removed `(neighbor, value)` pairs in ascending neighbor
    /// order. Mirror entries in neighbor rows are removed as well.
    pub fn clear_row(&mut self, i: usize) -> Vec<(usize, i64)> {
        self.diag[i] = 0;
        let removed: Vec<(usize, i64)> = std::mem::take(&mut self.rows[i]).into_iter().collect();
        for &(j, _) in &removed {
            self.rows[j].remove(&i);
        }
        removed
    }

    /// Objective value of a 0/1 assignment.
    ///
    /// Arithmetic is checked; coefficient sums that leave `i64` report
    /// [`Error::Overflow`] instead of wrapping.
    pub fn evaluate(&self, assignment: &[u8]) -> Result<i64, Error> {
        if assignment.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: assignment.len() });
        }
        if let Some(&bad) = assignment.iter().find(|&&b| b > 1) {
            return Err(Error::NotBinary { value: bad });
        }
        let mut total: i64 = 0;
        for i in 0..self.n {
            if assignment[i] == 0 {
                continue;
            }
            total = total.checked_add(self.diag[i]).ok_or(Error::Overflow)?;
            for (&j, &v) in self.rows[i].range(i + 1..) {
                if assignment[j] == 1 {
                    total = total.checked_add(v).ok_or(Error::Overflow)?;
                }
            }
        }
        Ok(total)
    }

    /// Sum of absolute values of every stored coefficient.
    ///
    /// When this fits in `i64`, so does every quantity reduction and
    /// expansion derive from the instance: row sums, folded diagonals,
    /// offsets, and objective values are all bounded by it. Callers that
    /// rely on that invariant check once up front.
    pub fn magnitude_sum(&self) -> Result<i64, Error> {
        let mut total: i64 = 0;
        for (_, _, v) in self.entries() {
            let mag = v.checked_abs().ok_or(Error::Overflow)?;
            total = total.checked_add(mag).ok_or(Error::Overflow)?;
        }
        Ok(total)
    }
}

/// A 0/1 assignment together with its objective value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub assignment: Vec<u8>,
    pub objective: i64,
}

/// Per-row sums of positive and negative off-diagonal coefficients plus row
/// degree, the quantities the fixing rules test.
///
/// `recompute` builds them from scratch; `apply_quadratic_change` keeps them
/// current through edits so reduction passes never rescan rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowAggregates {
    pos: Vec<i64>,
    neg: Vec<i64>,
    deg: Vec<usize>,
}

impl RowAggregates {
    /// Builds aggregates for every row of `inst` from scratch.
    pub fn recompute(inst: &QuboInstance) -> Self {
        let n = inst.num_variables();
        let mut agg = RowAggregates { pos: vec![0; n], neg: vec![0; n], deg: vec![0; n] };
        for i in 0..n {
            for (_, v) in inst.row(i) {
                agg.absorb(i, v);
            }
        }
        agg
    }

    /// Sum of positive off-diagonal coefficients in row `i` (zero if none).
    pub fn pos_sum(&self, i: usize) -> i64 {
        self.pos[i]
    }

    /// Sum of negative off-diagonal coefficients in row `i` (zero if none).
    pub fn neg_sum(&self, i: usize) -> i64 {
        self.neg[i]
    }

    /// Number of off-diagonal entries in row `i`.
    pub fn degree(&self, i: usize) -> usize {
        self.deg[i]
    }

    /// Updates both rows after the coefficient of `{i, j}` changed from
    /// `old` to `new`. Either value may be zero (entry created or removed).
    pub fn apply_quadratic_change(&mut self, i: usize, j: usize, old: i64, new: i64) {
        self.shed(i, old);
        self.shed(j, old);
        self.absorb(i, new);
        self.absorb(j, new);
    }

    fn absorb(&mut self, i: usize, v: i64) {
        if v > 0 {
            self.pos[i] += v;
            self.deg[i] += 1;
        } else if v < 0 {
            self.neg[i] += v;
            self.deg[i] += 1;
        }
    }

    fn shed(&mut self, i: usize, v: i64) {
        if v > 0 {
            self.pos[i] -= v;
            self.deg[i] -= 1;
        } else if v < 0 {
            self.neg[i] -= v;
            self.deg[i] -= 1;
        }
    }
}
