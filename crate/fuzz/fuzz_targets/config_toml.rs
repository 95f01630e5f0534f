//! Experiment config parser: no panics; accepted configs must re-serialize
//! to something the parser accepts again (floats may be NaN here, so the
//! check is re-parseability rather than equality).

#![no_main]

use libfuzzer_sys::fuzz_target;
use symnav_cli::config::ExperimentFile;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(file) = ExperimentFile::from_toml_str(text) {
        let serialized = toml::to_string(&file).expect("accepted config must serialize");
        ExperimentFile::from_toml_str(&serialized).expect("serialized config must re-parse");
    }
});
