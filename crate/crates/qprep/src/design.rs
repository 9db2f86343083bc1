//! Two-level fractional-factorial analysis of the generator parameters.
//!
//! The benchmark family varies six generator factors over sixteen runs, a
//! quarter fraction of the full 64-run grid. This module holds the coded
//! run matrix, computes main and two-factor interaction effects from a
//! response vector, reports which interactions are confounded with each
//! other, and evaluates the fitted percent-reduction surface.
//!
//! Factors are indexed 0 to 5 throughout; user-facing layers label them
//! 1 to 6.

use crate::Error;

pub const RUNS: usize = 16;
pub const FACTORS: usize = 6;

/// Coded run matrix: sixteen runs by six factors, each entry -1 (low) or
/// +1 (high).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignMatrix {
    codes: [[i8; FACTORS]; RUNS],
}

impl DesignMatrix {
    /// The benchmark design. Every column is balanced, and the fraction
    /// confounds some interaction pairs; see `alias_groups`.
    pub fn standard() -> Self {
        DesignMatrix {
            codes: [
                [-1, 1, 1, -1, -1, 1],
                [1, 1, 1, 1, 1, 1],
                [-1, -1, 1, 1, -1, -1],
                [1, -1, 1, -1, 1, -1],
                [-1, 1, -1, -1, 1, -1],
                [1, 1, -1, 1, -1, -1],
                [-1, -1, -1, 1, 1, 1],
                [1, -1, -1, -1, -1, 1],
                [1, -1, -1, 1, 1, -1],
                [-1, -1, -1, -1, -1, -1],
                [1, 1, -1, -1, 1, 1],
                [-1, 1, -1, 1, -1, 1],
                [1, -1, 1, 1, -1, 1],
                [-1, -1, 1, -1, 1, 1],
                [1, 1, 1, -1, -1, -1],
                [-1, 1, 1, 1, 1, -1],
            ],
        }
    }

    /// Code of `factor` in `run`, both zero-based.
    pub fn code(&self, run: usize, factor: usize) -> i8 {
        self.codes[run][factor]
    }

    /// One run's codes.
    pub fn row(&self, run: usize) -> [i8; FACTORS] {
        self.codes[run]
    }

    /// Product column of two factors; interactions live on these.
    fn product_column(&self, a: usize, b: usize) -> [i8; RUNS] {
        let mut col = [0i8; RUNS];
        for (r, slot) in col.iter_mut().enumerate() {
            *slot = self.codes[r][a] * self.codes[r][b];
        }
        col
    }
}

/// One two-factor interaction, on zero-based factor indices `a < b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Interaction {
    pub a: usize,
    pub b: usize,
    pub value: f64,
}

/// Effects computed from one response vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectsReport {
    /// Per-factor main effect: mean response at the high setting minus mean
    /// at the low setting.
    pub main: [f64; FACTORS],
    /// All fifteen two-factor interactions, ascending by `(a, b)`.
    pub interactions: Vec<Interaction>,
    /// Factor pairs whose product columns coincide in the design; members
    /// of a group measure one and the same quantity, so their values are
    /// forced equal and cannot be told apart by these sixteen runs.
    pub alias_groups: Vec<Vec<(usize, usize)>>,
}

/// Computes main and interaction effects. `responses` must hold one value
/// per design run, in run order.
pub fn main_effects(design: &DesignMatrix, responses: &[f64]) -> Result<EffectsReport, Error> {
    if responses.len() != RUNS {
        return Err(Error::LengthMismatch { expected: RUNS, got: responses.len() });
    }
    let half = (RUNS / 2) as f64;

    let mut main = [0.0; FACTORS];
    for (f, slot) in main.iter_mut().enumerate() {
        let sum: f64 = (0..RUNS).map(|r| f64::from(design.code(r, f)) * responses[r]).sum();
        *slot = sum / half;
    }

    let mut interactions = Vec::with_capacity(FACTORS * (FACTORS - 1) / 2);
    // Identical product columns get one shared group, discovered in pair
    // order so the report is deterministic.
    let mut seen: Vec<([i8; RUNS], Vec<(usize, usize)>)> = Vec::new();
    for a in 0..FACTORS {
        for b in (a + 1)..FACTORS {
            let col = design.product_column(a, b);
            let sum: f64 = (0..RUNS).map(|r| f64::from(col[r]) * responses[r]).sum();
            interactions.push(Interaction { a, b, value: sum / half });
            match seen.iter_mut().find(|(c, _)| *c == col) {
                Some((_, group)) => group.push((a, b)),
                None => seen.push((col, vec![(a, b)])),
            }
        }
    }
    let alias_groups = seen.into_iter().map(|(_, group)| group).collect();

    Ok(EffectsReport { main, interactions, alias_groups })
}

/// Fitted percent-reduction surface over the coded factor space. Accepts
/// any point of the cube, each coordinate in [-1, 1]; the corners are the
/// design's own settings.
pub fn predict_reduction(factors: [f64; FACTORS]) -> Result<f64, Error> {
    for (i, &f) in factors.iter().enumerate() {
        if !(-1.0..=1.0).contains(&f) || f.is_nan() {
            return Err(Error::BadConfig(format!("factor {} must lie in [-1, 1], got {f}", i + 1)));
        }
    }
    let [f1, _, f3, f4, _, _] = factors;
    Ok(-3.0 * f1 + 8.0 * f3 + 16.0 * f4 + 5.0 * f3 * f4 + 30.0)
}
