#![no_main]

use libfuzzer_sys::fuzz_target;
use stochmatch::model::{parse_instance, serialize_instance};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // Must never panic; accepted inputs must survive a serialize round trip.
    if let Ok(instance) = parse_instance(text) {
        let rendered = serialize_instance(&instance);
        let reparsed = parse_instance(&rendered).expect("serialized instance must reparse");
        assert_eq!(serialize_instance(&reparsed), rendered);
    }
});
