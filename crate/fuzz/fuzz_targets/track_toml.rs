//! Track file parser: must never panic, and accepted inputs must have a
//! stable canonical form (serialize -> parse -> serialize is a fixed point).

#![no_main]

use libfuzzer_sys::fuzz_target;
use symnav::track::Track;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(track) = Track::from_toml_str(text) {
        let canon = track.to_toml_string();
        let reparsed = Track::from_toml_str(&canon).expect("canonical form must parse");
        assert_eq!(reparsed.to_toml_string(), canon, "canonical form must be a fixed point");
    }
});
