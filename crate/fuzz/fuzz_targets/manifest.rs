#![no_main]

use dmimo_core::manifest::RunManifest;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(m) = RunManifest::parse(text) {
        let back = RunManifest::parse(&m.render()).expect("rendered manifest parses");
        assert_eq!(back.config, m.config);
        assert_eq!(back.command, m.command);
        assert_eq!(back.master_seed(), m.master_seed());
    }
});
