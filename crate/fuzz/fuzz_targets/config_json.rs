//! Config parser: total on arbitrary text; accepted configs must also
//! survive resolution without panicking.

#![no_main]

use libfuzzer_sys::fuzz_target;
use mmlab::config::{parse_config_str, ExperimentConfig};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(file) = parse_config_str(s) {
            let _ = ExperimentConfig::resolve(file);
        }
    }
});
