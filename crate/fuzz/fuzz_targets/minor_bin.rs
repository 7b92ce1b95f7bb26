//! Minor binary decoder: total on arbitrary bytes; accepted input is
//! exactly the canonical encoding of the decoded minor.

#![no_main]

use libfuzzer_sys::fuzz_target;
use mmlab::matdist::DistanceMinor;

fuzz_target!(|data: &[u8]| {
    if let Ok(minor) = DistanceMinor::from_bytes(data) {
        assert_eq!(minor.to_bytes(), data);
    }
});
