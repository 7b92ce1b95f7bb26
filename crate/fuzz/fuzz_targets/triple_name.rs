//! Triple-name parser: must return an error, never panic, on any input.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = mmlab::triples::parse_triple(s);
    }
});
