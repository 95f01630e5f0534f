//! Trajectory CSV parser: strict, line-oriented, and must never panic on
//! arbitrary input.

#![no_main]

use libfuzzer_sys::fuzz_target;
use symnav_cli::trajectory;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = trajectory::parse_csv(text);
});
