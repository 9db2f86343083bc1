//! Reduction reports: the parser cross-validates counts, coverage, and rule
//! consistency; no input may panic it, and accepted reports must round trip.

#![no_main]

use libfuzzer_sys::fuzz_target;
use qprep::format::{parse_report, write_report};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(report) = parse_report(text) else { return };
    let written = write_report(&report);
    let reparsed = parse_report(&written).expect("canonical form must parse");
    assert_eq!(reparsed, report, "round trip changed the report");
});
