//! `key = value` documents: parsing never panics and rendering round-trips.

#![no_main]

use dmimo_core::kv::Document;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(doc) = Document::parse(text) else {
        return;
    };
    let back = Document::parse(&doc.render()).expect("rendered document parses");
    assert_eq!(back.entries().len(), doc.entries().len());
    for (a, b) in doc.entries().iter().zip(back.entries()) {
        assert_eq!(a.key, b.key);
        assert_eq!(a.value, b.value);
    }
});
