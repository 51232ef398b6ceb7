#![no_main]

use libfuzzer_sys::fuzz_target;

use fliess::format::{parse_series_str, serialize_series};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // must never panic; accepted input must round-trip bit-exactly
    if let Ok(series) = parse_series_str(text) {
        let canonical = serialize_series(&series);
        let reparsed = parse_series_str(&canonical).expect("canonical form parses");
        assert_eq!(reparsed, series);
        assert_eq!(serialize_series(&reparsed), canonical);
    }
});
