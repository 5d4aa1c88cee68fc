#![no_main]

use dmimo_core::scenario::{parse_scenario_file, ScenarioConfig};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(file) = parse_scenario_file(text) {
        // A valid configuration renders to text that parses back to itself.
        let again = ScenarioConfig::parse(&file.config.render()).expect("rendered scenario parses");
        assert_eq!(again, file.config);
    }
});
