//! Instance files: arbitrary bytes must never panic the parser, and any
//! accepted input must survive a write/reparse round trip unchanged.

#![no_main]

use libfuzzer_sys::fuzz_target;
use qprep::format::{parse_instance, write_instance};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(inst) = parse_instance(text) else { return };
    let written = write_instance(&inst);
    let reparsed = parse_instance(&written).expect("canonical form must parse");
    assert_eq!(reparsed, inst, "round trip changed the instance");
});
