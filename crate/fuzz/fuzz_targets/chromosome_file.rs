//! Chromosome file parser: no panics; accepted files have a stable
//! two-line canonical form.

#![no_main]

use libfuzzer_sys::fuzz_target;
use symnav::network::Chromosome;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(chromosome) = Chromosome::from_file_str(text) {
        let canon = chromosome.to_file_string();
        let reparsed = Chromosome::from_file_str(&canon).expect("canonical form must parse");
        assert_eq!(reparsed.to_file_string(), canon, "canonical form must be a fixed point");
    }
});
