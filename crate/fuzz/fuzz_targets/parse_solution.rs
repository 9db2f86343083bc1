//! Solution files: objective plus optional bit line; no panic on any input,
//! and accepted solutions must round trip.

#![no_main]

use libfuzzer_sys::fuzz_target;
use qprep::format::{parse_solution, write_solution};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(solution) = parse_solution(text) else { return };
    let written = write_solution(&solution);
    let reparsed = parse_solution(&written).expect("canonical form must parse");
    assert_eq!(reparsed, solution, "round trip changed the solution");
});
