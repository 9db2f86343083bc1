//! Text formats: instance files, reduction reports, solution files, and
//! the write-only expansion report.
//!
//! Instance files are row-col-value text. Lines starting with `#` and
//! blank lines are ignored. The first data line is `<n> <entryCount>`;
//! each of the following `entryCount` lines is `<i> <j> <value>` with
//! 1-based indices, `i <= j`, and `i == j` denoting a linear term.
//!
//! Reports are line-oriented `<key> <values...>` documents starting with a
//! versioned `schema` line. Parsers validate internal consistency, not
//! just syntax, so a report that parses is safe to lift through.
//!
//! Every parse error carries the 1-based line number of the offending
//! line. All parse-write-parse round trips are identities.

use std::fmt::Write as _;

use crate::instance::{QuboInstance, Solution};
use crate::reduce::{FixedValue, Fixing, ReductionLog, Rule};
use crate::expand::ExpansionLog;
use crate::Error;

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Data lines (trimmed, nonblank, noncomment) with their 1-based numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(idx, raw)| (idx + 1, raw.trim()))
        .filter(|&(_, line)| !line.is_empty() && !line.starts_with('#'))
}

fn parse_token<T: std::str::FromStr>(line: usize, token: &str, what: &str) -> Result<T, Error> {
    token.parse().map_err(|_| parse_error(line, format!("{what} is not valid: {token:?}")))
}

// ---------------------------------------------------------------------------
// Instance files

/// Parses an instance document. Diagnostics carry the offending line.
pub fn parse_instance(text: &str) -> Result<QuboInstance, Error> {
    let mut lines = data_lines(text);
    let (header_no, header) = lines
        .next()
        .ok_or_else(|| parse_error(text.lines().count().max(1), "missing header line"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 2 {
        return Err(parse_error(header_no, "header must be `<n> <entryCount>`"));
    }
    let n: usize = parse_token(header_no, tokens[0], "variable count")?;
    let count: usize = parse_token(header_no, tokens[1], "entry count")?;

    let mut inst = QuboInstance::new(n);
    let mut seen_diag = vec![false; n];
    let mut parsed = 0usize;
    for (line_no, line) in lines {
        if parsed == count {
            return Err(parse_error(line_no, format!("unexpected content after {count} entries")));
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 3 {
            return Err(parse_error(line_no, "entry must be `<i> <j> <value>`"));
        }
        let i: usize = parse_token(line_no, tokens[0], "row index")?;
        let j: usize = parse_token(line_no, tokens[1], "column index")?;
        let value: i64 = parse_token(line_no, tokens[2], "coefficient")?;
        if i < 1 || i > n || j < 1 || j > n {
            return Err(parse_error(line_no, format!("index out of range in ({i}, {j}); n is {n}")));
        }
        if i > j {
            return Err(parse_error(line_no, format!("indices must satisfy i <= j, got ({i}, {j})")));
        }
        if i == j {
            if seen_diag[i - 1] {
                return Err(parse_error(line_no, format!("duplicate entry for ({i}, {j})")));
            }
            seen_diag[i - 1] = true;
            inst.set_linear(i - 1, value);
        } else {
            if value == 0 {
                return Err(parse_error(line_no, format!("zero off-diagonal value for ({i}, {j})")));
            }
            if inst.quadratic(i - 1, j - 1) != 0 {
                return Err(parse_error(line_no, format!("duplicate entry for ({i}, {j})")));
            }
            inst.set_quadratic(i - 1, j - 1, value)?;
        }
        parsed += 1;
    }
    if parsed != count {
        let last = text.lines().count().max(1);
        return Err(parse_error(last, format!("header promises {count} entries, found {parsed}")));
    }
    Ok(inst)
}

/// Writes an instance document; entries ascend by (row, column) and zero
/// diagonals are omitted.
pub fn write_instance(inst: &QuboInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", inst.num_variables(), inst.entry_count());
    for (i, j, v) in inst.entries() {
        let _ = writeln!(out, "{} {} {}", i + 1, j + 1, v);
    }
    out
}

// ---------------------------------------------------------------------------
// Reduction reports

pub const REDUCTION_SCHEMA: &str = "qprep-reduction-v1";

/// A reduction log plus the file-level statistics the report format carries.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionReport {
    pub log: ReductionLog,
    pub reduced_n: usize,
    pub original_entries: usize,
    pub reduced_entries: usize,
    /// Wall-clock reduction time; informational only.
    pub elapsed_ms: f64,
}

fn rule_token(rule: Rule) -> &'static str {
    match rule {
        Rule::R1 => "R1",
        Rule::R2 => "R2",
        Rule::R3 => "R3",
        Rule::R5 => "R5",
    }
}

fn value_token(value: FixedValue) -> &'static str {
    match value {
        FixedValue::Zero => "0",
        FixedValue::One => "1",
        FixedValue::Free => "free",
    }
}

/// Writes a reduction report document.
pub fn write_report(report: &ReductionReport) -> String {
    let log = &report.log;
    let mut out = String::new();
    let _ = writeln!(out, "schema {REDUCTION_SCHEMA}");
    let _ = writeln!(out, "original_n {}", log.original_n);
    let _ = writeln!(out, "reduced_n {}", report.reduced_n);
    let _ = writeln!(out, "original_entries {}", report.original_entries);
    let _ = writeln!(out, "reduced_entries {}", report.reduced_entries);
    let _ = writeln!(out, "offset {}", log.offset);
    let _ = writeln!(out, "passes {}", log.passes);
    let _ = writeln!(out, "rule1_fixes {}", log.rule_count(Rule::R1));
    let _ = writeln!(out, "rule2_fixes {}", log.rule_count(Rule::R2));
    let _ = writeln!(out, "rule3_fixes {}", log.rule_count(Rule::R3));
    let _ = writeln!(out, "rule5_free {}", log.rule_count(Rule::R5));
    let _ = writeln!(out, "elapsed_ms {}", report.elapsed_ms);
    for f in &log.fixings {
        let _ = writeln!(
            out,
            "fixing {} {} {} {}",
            f.variable + 1,
            value_token(f.value),
            rule_token(f.rule),
            f.pass
        );
    }
    for (reduced, &original) in log.remap.iter().enumerate() {
        let _ = writeln!(out, "remap {} {}", reduced + 1, original + 1);
    }
    out
}

/// Parses and validates a reduction report. Beyond syntax, the fixing and
/// remap lines must jointly cover every original variable exactly once,
/// per-rule counts must match the fixing lines, and each fixing's value
/// must be the one its rule produces.
pub fn parse_report(text: &str) -> Result<ReductionReport, Error> {
    let mut scalars: Vec<(&'static str, Option<(usize, i64)>)> = vec![
        ("original_n", None),
        ("reduced_n", None),
        ("original_entries", None),
        ("reduced_entries", None),
        ("offset", None),
        ("passes", None),
        ("rule1_fixes", None),
        ("rule2_fixes", None),
        ("rule3_fixes", None),
        ("rule5_free", None),
    ];
    let mut elapsed: Option<f64> = None;
    let mut fixings: Vec<(usize, Fixing)> = Vec::new();
    let mut remap: Vec<(usize, usize, usize)> = Vec::new();
    let mut saw_schema = false;
    let mut last_line = 1;

    for (line_no, line) in data_lines(text) {
        last_line = line_no;
        let mut tokens = line.split_whitespace();
        let keyword = tokens.next().expect("data lines are nonblank");
        let rest: Vec<&str> = tokens.collect();
        if !saw_schema {
            if keyword != "schema" {
                return Err(parse_error(line_no, "first line must declare the schema"));
            }
            if rest != [REDUCTION_SCHEMA] {
                return Err(parse_error(line_no, format!("unsupported schema {:?}", rest.join(" "))));
            }
            saw_schema = true;
            continue;
        }
        match keyword {
            "schema" => return Err(parse_error(line_no, "duplicate schema line")),
            "elapsed_ms" => {
                if rest.len() != 1 {
                    return Err(parse_error(line_no, "elapsed_ms takes one value"));
                }
                let value: f64 = parse_token(line_no, rest[0], "elapsed_ms")?;
                if !value.is_finite() {
                    return Err(parse_error(line_no, "elapsed_ms must be finite"));
                }
                if elapsed.replace(value).is_some() {
                    return Err(parse_error(line_no, "duplicate elapsed_ms line"));
                }
            }
            "fixing" => {
                if rest.len() != 4 {
                    return Err(parse_error(line_no, "fixing must be `fixing <var> <0|1|free> <rule> <pass>`"));
                }
                let variable: usize = parse_token(line_no, rest[0], "fixing variable")?;
                if variable == 0 {
                    return Err(parse_error(line_no, "fixing variable must be 1-based"));
                }
                let value = match rest[1] {
                    "0" => FixedValue::Zero,
                    "1" => FixedValue::One,
                    "free" => FixedValue::Free,
                    other => return Err(parse_error(line_no, format!("unknown fixing value {other:?}"))),
                };
                let rule = match rest[2] {
                    "R1" => Rule::R1,
                    "R2" => Rule::R2,
                    "R3" => Rule::R3,
                    "R5" => Rule::R5,
                    other => return Err(parse_error(line_no, format!("unknown rule {other:?}"))),
                };
                let expected = match rule {
                    Rule::R1 | Rule::R3 => FixedValue::One,
                    Rule::R2 => FixedValue::Zero,
                    Rule::R5 => FixedValue::Free,
                };
                if value != expected {
                    return Err(parse_error(
                        line_no,
                        format!("rule {} cannot fix a variable to {}", rest[2], rest[1]),
                    ));
                }
                let pass: u32 = parse_token(line_no, rest[3], "fixing pass")?;
                fixings.push((line_no, Fixing { variable: variable - 1, value, rule, pass }));
            }
            "remap" => {
                if rest.len() != 2 {
                    return Err(parse_error(line_no, "remap must be `remap <reduced> <original>`"));
                }
                let reduced: usize = parse_token(line_no, rest[0], "reduced index")?;
                let original: usize = parse_token(line_no, rest[1], "original index")?;
                if reduced == 0 || original == 0 {
                    return Err(parse_error(line_no, "remap indices must be 1-based"));
                }
                remap.push((line_no, reduced, original));
            }
            other => match scalars.iter_mut().find(|(name, _)| *name == other) {
                Some((name, slot)) => {
                    if rest.len() != 1 {
                        return Err(parse_error(line_no, format!("{name} takes one value")));
                    }
                    let value: i64 = parse_token(line_no, rest[0], name)?;
                    if slot.replace((line_no, value)).is_some() {
                        return Err(parse_error(line_no, format!("duplicate {name} line")));
                    }
                }
                None => return Err(parse_error(line_no, format!("unknown keyword {other:?}"))),
            },
        }
    }
    if !saw_schema {
        return Err(parse_error(last_line, "missing schema line"));
    }

    let need = |name: &str| -> Result<(usize, i64), Error> {
        scalars
            .iter()
            .find(|(k, _)| *k == name)
            .and_then(|(_, v)| *v)
            .ok_or_else(|| parse_error(last_line, format!("missing {name} line")))
    };
    let (line, raw) = need("original_n")?;
    let original_n =
        usize::try_from(raw).map_err(|_| parse_error(line, "original_n must be nonnegative"))?;
    let (line, raw) = need("reduced_n")?;
    let reduced_n =
        usize::try_from(raw).map_err(|_| parse_error(line, "reduced_n must be nonnegative"))?;
    let (line, raw) = need("original_entries")?;
    let original_entries =
        usize::try_from(raw).map_err(|_| parse_error(line, "original_entries must be nonnegative"))?;
    let (line, raw) = need("reduced_entries")?;
    let reduced_entries =
        usize::try_from(raw).map_err(|_| parse_error(line, "reduced_entries must be nonnegative"))?;
    let (_, offset) = need("offset")?;
    let (line, raw) = need("passes")?;
    let passes = u32::try_from(raw).map_err(|_| parse_error(line, "passes must be nonnegative"))?;
    let elapsed_ms =
        elapsed.ok_or_else(|| parse_error(last_line, "missing elapsed_ms line"))?;

    // Cross-checks: counts, coverage, remap shape.
    for (name, rule) in
        [("rule1_fixes", Rule::R1), ("rule2_fixes", Rule::R2), ("rule3_fixes", Rule::R3), ("rule5_free", Rule::R5)]
    {
        let (line, claimed) = need(name)?;
        let actual = fixings.iter().filter(|(_, f)| f.rule == rule).count() as i64;
        if claimed != actual {
            return Err(parse_error(line, format!("{name} claims {claimed} but {actual} fixing lines carry that rule")));
        }
    }
    if reduced_n != remap.len() {
        return Err(parse_error(last_line, format!("reduced_n is {reduced_n} but {} remap lines follow", remap.len())));
    }
    if fixings.len() + remap.len() != original_n {
        return Err(parse_error(
            last_line,
            format!("{} fixings plus {} survivors do not cover {original_n} variables", fixings.len(), remap.len()),
        ));
    }
    let mut covered = vec![false; original_n];
    for (line_no, f) in &fixings {
        if f.variable >= original_n {
            return Err(parse_error(*line_no, format!("fixing variable {} out of range", f.variable + 1)));
        }
        if std::mem::replace(&mut covered[f.variable], true) {
            return Err(parse_error(*line_no, format!("variable {} appears twice", f.variable + 1)));
        }
    }
    let mut remap_out = Vec::with_capacity(remap.len());
    let mut prev_original = 0;
    for (slot, (line_no, reduced, original)) in remap.iter().enumerate() {
        if *reduced != slot + 1 {
            return Err(parse_error(*line_no, format!("remap lines must ascend contiguously; expected index {}", slot + 1)));
        }
        if *original > original_n {
            return Err(parse_error(*line_no, format!("original index {original} out of range")));
        }
        if *original <= prev_original {
            return Err(parse_error(*line_no, "remap original indices must strictly ascend"));
        }
        prev_original = *original;
        if std::mem::replace(&mut covered[original - 1], true) {
            return Err(parse_error(*line_no, format!("variable {original} appears twice")));
        }
        remap_out.push(original - 1);
    }
    debug_assert!(covered.into_iter().all(|c| c));

    let log = ReductionLog {
        original_n,
        fixings: fixings.into_iter().map(|(_, f)| f).collect(),
        offset,
        passes,
        remap: remap_out,
    };
    Ok(ReductionReport { log, reduced_n, original_entries, reduced_entries, elapsed_ms })
}

// ---------------------------------------------------------------------------
// Solution files

/// Parses a solution document: an objective line, then a space-separated
/// 0/1 line that is absent for zero-variable instances.
pub fn parse_solution(text: &str) -> Result<Solution, Error> {
    let mut lines = data_lines(text);
    let (line_no, value_line) = lines
        .next()
        .ok_or_else(|| parse_error(text.lines().count().max(1), "missing objective line"))?;
    let tokens: Vec<&str> = value_line.split_whitespace().collect();
    if tokens.len() != 1 {
        return Err(parse_error(line_no, "objective line must hold a single integer"));
    }
    let objective: i64 = parse_token(line_no, tokens[0], "objective")?;
    let assignment = match lines.next() {
        None => Vec::new(),
        Some((line_no, bits)) => bits
            .split_whitespace()
            .map(|t| match t {
                "0" => Ok(0u8),
                "1" => Ok(1u8),
                other => Err(parse_error(line_no, format!("assignment entries must be 0 or 1, got {other:?}"))),
            })
            .collect::<Result<_, _>>()?,
    };
    if let Some((line_no, _)) = lines.next() {
        return Err(parse_error(line_no, "unexpected content after the assignment line"));
    }
    Ok(Solution { assignment, objective })
}

/// Writes a solution document.
pub fn write_solution(solution: &Solution) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", solution.objective);
    if !solution.assignment.is_empty() {
        let bits: Vec<String> = solution.assignment.iter().map(u8::to_string).collect();
        let _ = writeln!(out, "{}", bits.join(" "));
    }
    out
}

// ---------------------------------------------------------------------------
// Expansion reports

pub const EXPANSION_SCHEMA: &str = "qprep-expansion-v1";

/// Writes an expansion report. Write-only: expansions are undone from the
/// in-memory log, not re-parsed from disk.
pub fn write_expansion_report(log: &ExpansionLog) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "schema {EXPANSION_SCHEMA}");
    let _ = writeln!(out, "original_n {}", log.original_n);
    let _ = writeln!(out, "expanded_n {}", log.expanded_n());
    let _ = writeln!(out, "cap {}", log.cap);
    let _ = writeln!(out, "penalty {}", log.penalty);
    for chain in &log.chains {
        let members: Vec<String> = chain.added.iter().map(|k| (k + 1).to_string()).collect();
        let _ = writeln!(out, "chain {} {}", chain.original + 1, members.join(" "));
    }
    for m in &log.moved {
        let _ = writeln!(out, "moved {} {} {}", m.to + 1, m.neighbor + 1, m.value);
    }
    out
}
