//! Variable fixing by persistency and the fixpoint reduction pass.
//!
//! Each rule reads one row (or one positive edge and its two rows) and
//! decides a variable's value in some optimal solution:
//!
//! * rule 1: `c[i][i] + negSum(i) >= 0` fixes `x[i] = 1`; the diagonal moves
//!   into the offset and row `i` folds into its neighbors' diagonals,
//! * rule 2: `c[i][i] + posSum(i) <= 0` fixes `x[i] = 0`; the row is dropped,
//! * rule 3: for a positive edge `{i,h}` where rule 1 fails on both ends,
//!   `c[i][i] + c[h][h] + c[i][h] + negSum(i) + negSum(h) >= 0` fixes both
//!   variables to 1,
//! * rule 5: an all-zero row is unconstrained; the variable leaves the
//!   instance as `Free` and lifts to 0.
//!
//! A pass scans surviving rows in ascending index applying the first of
//! rules 5, 1, 2 that holds (a zero row counts as free, not as a rule 1
//! fixing), then scans surviving positive edges in ascending `(i, h)` order
//! applying rule 3. Applications are eager: diagonal folds are visible to
//! later checks in the same pass. The loop stops when a pass fixes nothing.
//!
//! Rule 4 (`x[i] + x[h] <= 1` for a heavy enough edge) never triggers under
//! its stated side conditions when the edge is positive; [`detect_rule4`]
//! keeps the literal form for completeness next to the analog form that
//! fires on negative edges. Both are detection only.

use crate::{Error, QuboInstance, RowAggregates, Solution};

/// Which fixing rule produced a [`Fixing`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    R1,
    R2,
    R3,
    R5,
}

/// Value assigned to a fixed variable. `Free` marks a variable whose row was
/// entirely zero; lifting materializes it as 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedValue {
    Zero,
    One,
    Free,
}

impl FixedValue {
    /// The 0/1 value this fixing contributes to a lifted assignment.
    pub fn as_bit(self) -> u8 {
        match self {
            FixedValue::One => 1,
            FixedValue::Zero | FixedValue::Free => 0,
        }
    }
}

/// One fixed variable: who, what, which rule, and in which pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixing {
    pub variable: usize,
    pub value: FixedValue,
    pub rule: Rule,
    /// 1-based productive pass index, 0 for applications outside [`reduce`].
    pub pass: u32,
}

/// Everything needed to map reduced-space solutions back to the original
/// index space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionLog {
    pub original_n: usize,
    pub fixings: Vec<Fixing>,
    /// Constant harvested by rules 1 and 3; for every reduced assignment `y`,
    /// original objective = reduced objective + offset.
    pub offset: i64,
    /// Number of passes that fixed at least one variable.
    pub passes: u32,
    /// `remap[k]` is the original index of reduced variable `k`, ascending.
    pub remap: Vec<usize>,
}

impl ReductionLog {
    /// Number of fixings produced by `rule`.
    pub fn rule_count(&self, rule: Rule) -> usize {
        self.fixings.iter().filter(|f| f.rule == rule).count()
    }

    /// Fixed variables as a share of the original count, in percent.
    pub fn percent_reduction(&self) -> f64 {
        if self.original_n == 0 {
            return 0.0;
        }
        100.0 * self.fixings.len() as f64 / self.original_n as f64
    }

    /// Extends a reduced-space assignment to the original index space.
    pub fn lift_assignment(&self, reduced: &[u8]) -> Result<Vec<u8>, Error> {
        if reduced.len() != self.remap.len() {
            return Err(Error::LengthMismatch { expected: self.remap.len(), got: reduced.len() });
        }
        if self.fixings.len() + self.remap.len() != self.original_n {
            return Err(Error::BadConfig("reduction log does not cover every variable".into()));
        }
        let mut full = vec![0u8; self.original_n];
        for fixing in &self.fixings {
            full[fixing.variable] = fixing.value.as_bit();
        }
        for (k, &original) in self.remap.iter().enumerate() {
            if reduced[k] > 1 {
                return Err(Error::NotBinary { value: reduced[k] });
            }
            full[original] = reduced[k];
        }
        Ok(full)
    }
}

/// Mutable reduction state: the shrinking instance, live row aggregates, and
/// the fixing trail. [`reduce`] drives it; the `rule*` methods are public so
/// single steps can be exercised and audited on their own.
#[derive(Debug, Clone)]
pub struct Reducer {
    inst: QuboInstance,
    agg: RowAggregates,
    alive: Vec<bool>,
    offset: i64,
    fixings: Vec<Fixing>,
    passes: u32,
}

impl Reducer {
    /// Copies `inst` into working form. Fails if the total coefficient
    /// magnitude overflows, which guarantees every later sum fits in `i64`.
    pub fn new(inst: &QuboInstance) -> Result<Self, Error> {
        inst.magnitude_sum()?;
        Ok(Reducer {
            agg: RowAggregates::recompute(inst),
            alive: vec![true; inst.num_variables()],
            inst: inst.clone(),
            offset: 0,
            fixings: Vec::new(),
            passes: 0,
        })
    }

    /// The working instance. Rows of fixed variables are empty.
    pub fn instance(&self) -> &QuboInstance {
        &self.inst
    }

    /// Incrementally maintained aggregates for the working instance.
    pub fn aggregates(&self) -> &RowAggregates {
        &self.agg
    }

    /// Whether variable `i` is still part of the instance.
    pub fn is_alive(&self, i: usize) -> bool {
        self.alive[i]
    }

    /// Offset accumulated so far.
    pub fn offset(&self) -> i64 {
        self.offset
    }

    fn check_alive(&self, i: usize) -> Result<(), Error> {
        if i >= self.alive.len() {
            return Err(Error::IndexOutOfRange { index: i, n: self.alive.len() });
        }
        if !self.alive[i] {
            return Err(Error::DeadRow { index: i });
        }
        Ok(())
    }

    /// Rule 1 test for row `i`: diagonal plus negative-coefficient sum is
    /// nonnegative. Holds vacuously on an all-zero row; [`reduce`] classifies
    /// such rows as rule 5 first.
    pub fn rule1_holds(&self, i: usize) -> Result<bool, Error> {
        self.check_alive(i)?;
        Ok(self.inst.linear(i) + self.agg.neg_sum(i) >= 0)
    }

    /// Rule 2 test for row `i`: diagonal plus positive-coefficient sum is
    /// nonpositive.
    pub fn rule2_holds(&self, i: usize) -> Result<bool, Error> {
        self.check_alive(i)?;
        Ok(self.inst.linear(i) + self.agg.pos_sum(i) <= 0)
    }

    /// Rule 3 test for the positive edge `{i, h}`, `i < h`. The edge must
    /// exist with a positive coefficient and rule 1 must fail on both rows;
    /// violating either precondition is an error, not a `false`.
    pub fn rule3_holds(&self, i: usize, h: usize) -> Result<bool, Error> {
        self.check_alive(i)?;
        self.check_alive(h)?;
        if i >= h {
            return Err(Error::UnorderedPair { i, j: h });
        }
        let v = self.inst.quadratic(i, h);
        if v <= 0 {
            return Err(Error::RuleDoesNotHold { rule: "rule 3 precondition (positive edge)", index: i });
        }
        if self.rule1_holds(i)? || self.rule1_holds(h)? {
            return Err(Error::RuleDoesNotHold { rule: "rule 3 precondition (rule 1 open)", index: i });
        }
        let sum = self.inst.linear(i)
            + self.inst.linear(h)
            + v
            + self.agg.neg_sum(i)
            + self.agg.neg_sum(h);
        Ok(sum >= 0)
    }

    /// Rule 5 test: row `i` is entirely zero.
    pub fn rule5_holds(&self, i: usize) -> Result<bool, Error> {
        self.check_alive(i)?;
        Ok(self.inst.linear(i) == 0 && self.inst.degree(i) == 0)
    }

    /// Fixes `x[i] = 1`: diagonal into the offset, row coefficients into the
    /// neighbors' diagonals, row removed.
    pub fn apply_rule1(&mut self, i: usize) -> Result<(), Error> {
        if !self.rule1_holds(i)? {
            return Err(Error::RuleDoesNotHold { rule: "rule 1", index: i });
        }
        self.offset += self.inst.linear(i);
        for (j, v) in self.inst.clear_row(i) {
            self.inst.add_linear(j, v)?;
            self.agg.apply_quadratic_change(i, j, v, 0);
        }
        self.retire(i, FixedValue::One, Rule::R1);
        Ok(())
    }

    /// Fixes `x[i] = 0`: the row is removed without touching anything else.
    pub fn apply_rule2(&mut self, i: usize) -> Result<(), Error> {
        if !self.rule2_holds(i)? {
            return Err(Error::RuleDoesNotHold { rule: "rule 2", index: i });
        }
        for (j, v) in self.inst.clear_row(i) {
            self.agg.apply_quadratic_change(i, j, v, 0);
        }
        self.retire(i, FixedValue::Zero, Rule::R2);
        Ok(())
    }

    /// Fixes `x[i] = x[h] = 1`: both diagonals and the shared edge go into
    /// the offset, both rows fold into their neighbors' diagonals.
    pub fn apply_rule3(&mut self, i: usize, h: usize) -> Result<(), Error> {
        if !self.rule3_holds(i, h)? {
            return Err(Error::RuleDoesNotHold { rule: "rule 3", index: i });
        }
        let edge = self.inst.quadratic(i, h);
        self.offset += self.inst.linear(i) + self.inst.linear(h) + edge;
        for (j, v) in self.inst.clear_row(i) {
            if j != h {
                self.inst.add_linear(j, v)?;
            }
            self.agg.apply_quadratic_change(i, j, v, 0);
        }
        for (j, v) in self.inst.clear_row(h) {
            self.inst.add_linear(j, v)?;
            self.agg.apply_quadratic_change(h, j, v, 0);
        }
        self.retire(i, FixedValue::One, Rule::R3);
        self.retire(h, FixedValue::One, Rule::R3);
        Ok(())
    }

    /// Drops the unconstrained variable `i` as `Free`.
    pub fn apply_rule5(&mut self, i: usize) -> Result<(), Error> {
        if !self.rule5_holds(i)? {
            return Err(Error::RuleDoesNotHold { rule: "rule 5", index: i });
        }
        self.retire(i, FixedValue::Free, Rule::R5);
        Ok(())
    }

    fn retire(&mut self, i: usize, value: FixedValue, rule: Rule) {
        self.alive[i] = false;
        self.fixings.push(Fixing { variable: i, value, rule, pass: self.passes });
    }

    /// Runs passes until one fixes nothing. Returns the number of productive
    /// passes.
    pub fn run(&mut self) -> u32 {
        let n = self.alive.len();
        loop {
            self.passes += 1;
            let before = self.fixings.len();

            for i in 0..n {
                if !self.alive[i] {
                    continue;
                }
                if self.rule5_holds(i).unwrap() {
                    self.apply_rule5(i).unwrap();
                } else if self.rule1_holds(i).unwrap() {
                    self.apply_rule1(i).unwrap();
                } else if self.rule2_holds(i).unwrap() {
                    self.apply_rule2(i).unwrap();
                }
            }

            // Rule 3 applications never edit off-diagonal values, so the
            // candidate list collected here only loses members as rows die.
            let positive_edges: Vec<(usize, usize)> = (0..n)
                .filter(|&i| self.alive[i])
                .flat_map(|i| {
                    self.inst
                        .row(i)
                        .filter(move |&(h, v)| h > i && v > 0)
                        .map(move |(h, _)| (i, h))
                        .collect::<Vec<_>>()
                })
                .collect();
            for (i, h) in positive_edges {
                if !self.alive[i] || !self.alive[h] || self.inst.quadratic(i, h) <= 0 {
                    continue;
                }
                if self.rule1_holds(i).unwrap() || self.rule1_holds(h).unwrap() {
                    continue;
                }
                if self.rule3_holds(i, h).unwrap() {
                    self.apply_rule3(i, h).unwrap();
                }
            }

            if self.fixings.len() == before {
                self.passes -= 1;
                return self.passes;
            }
        }
    }

    /// Compacts the surviving rows into a fresh instance and closes the log.
    pub fn finish(self) -> (QuboInstance, ReductionLog) {
        let n = self.alive.len();
        let remap: Vec<usize> = (0..n).filter(|&i| self.alive[i]).collect();
        let mut to_new = vec![usize::MAX; n];
        for (new, &old) in remap.iter().enumerate() {
            to_new[old] = new;
        }
        let mut reduced = QuboInstance::new(remap.len());
        for (new, &old) in remap.iter().enumerate() {
            reduced.set_linear(new, self.inst.linear(old));
            for (j, v) in self.inst.row(old) {
                if j > old {
                    reduced.set_quadratic(new, to_new[j], v).expect("surviving edge");
                }
            }
        }
        let log = ReductionLog {
            original_n: n,
            fixings: self.fixings,
            offset: self.offset,
            passes: self.passes,
            remap,
        };
        (reduced, log)
    }
}

/// Reduces `inst` to fixpoint and returns the compacted instance with its
/// log. Identical input always produces an identical log.
pub fn reduce(inst: &QuboInstance) -> Result<(QuboInstance, ReductionLog), Error> {
    let mut reducer = Reducer::new(inst)?;
    reducer.run();
    Ok(reducer.finish())
}

/// Places fixed values and remapped values into a full assignment and prices
/// it: objective = reduced objective + offset, which equals the original
/// objective of the lifted assignment.
pub fn lift(
    log: &ReductionLog,
    reduced: &QuboInstance,
    assignment: &[u8],
) -> Result<Solution, Error> {
    if reduced.num_variables() != log.remap.len() {
        return Err(Error::LengthMismatch {
            expected: log.remap.len(),
            got: reduced.num_variables(),
        });
    }
    let full = log.lift_assignment(assignment)?;
    let objective = reduced
        .evaluate(assignment)?
        .checked_add(log.offset)
        .ok_or(Error::Overflow)?;
    Ok(Solution { assignment: full, objective })
}

/// Edge polarity [`detect_rule4`] scans for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule4Mode {
    /// Positive edges, the stated form. Its side conditions force the tested
    /// sum positive, so this mode provably never reports a pair.
    Literal,
    /// Negative edges, the form that can actually fire.
    Analog,
}

/// Scans for pairs `{i, h}` with `x[i] + x[h] <= 1` in some optimal
/// solution: rule 2 fails on both rows and
/// `c[i][i] + c[h][h] + c[i][h] + posSum(i) + posSum(h) <= 0`.
///
/// Detection only; pairs come back in ascending `(i, h)` order.
pub fn detect_rule4(inst: &QuboInstance, mode: Rule4Mode) -> Result<Vec<(usize, usize)>, Error> {
    inst.magnitude_sum()?;
    let agg = RowAggregates::recompute(inst);
    let n = inst.num_variables();
    let mut pairs = Vec::new();
    for i in 0..n {
        for (h, v) in inst.row(i) {
            if h < i {
                continue;
            }
            let polarity_ok = match mode {
                Rule4Mode::Literal => v > 0,
                Rule4Mode::Analog => v < 0,
            };
            if !polarity_ok {
                continue;
            }
            let rule2_open = inst.linear(i) + agg.pos_sum(i) > 0
                && inst.linear(h) + agg.pos_sum(h) > 0;
            if !rule2_open {
                continue;
            }
            let sum =
                inst.linear(i) + inst.linear(h) + v + agg.pos_sum(i) + agg.pos_sum(h);
            if sum <= 0 {
                pairs.push((i, h));
            }
        }
    }
    Ok(pairs)
}
