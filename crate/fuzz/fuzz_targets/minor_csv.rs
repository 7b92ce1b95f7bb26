//! Minor CSV decoder: total on arbitrary text, and every accepted minor
//! must re-encode and decode to the same entries.

#![no_main]

use libfuzzer_sys::fuzz_target;
use mmlab::matdist::DistanceMinor;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(minor) = DistanceMinor::from_csv(s) {
            let again = DistanceMinor::from_csv(&minor.to_csv()).expect("roundtrip decodes");
            assert_eq!(again.entries(), minor.entries());
            assert_eq!(again.stream(), minor.stream());
        }
    }
});
