#![no_main]

use libfuzzer_sys::fuzz_target;

use fliess::format::parse_signal_csv;
use fliess::sim::Grid;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // accepted signals must match the grid shape exactly
    let grid = Grid::new(1.0, 8);
    if let Ok(signal) = parse_signal_csv(text, grid) {
        assert_eq!(signal.values().len(), grid.len());
        assert!(signal.values().iter().all(|v| v.is_finite()));
    }
});
