#![no_main]

use libfuzzer_sys::fuzz_target;

use fliess::format::{
    parse_affine_pair_str, parse_tangent_pair_str, serialize_affine_pair, serialize_tangent_pair,
};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(pair) = parse_affine_pair_str(text) {
        let canonical = serialize_affine_pair(&pair);
        let reparsed = parse_affine_pair_str(&canonical).expect("canonical form parses");
        assert_eq!(reparsed, pair);
    }
    if let Ok(pair) = parse_tangent_pair_str(text) {
        let canonical = serialize_tangent_pair(&pair);
        let reparsed = parse_tangent_pair_str(&canonical).expect("canonical form parses");
        assert_eq!(reparsed, pair);
    }
});
