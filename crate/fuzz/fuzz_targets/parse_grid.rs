#![no_main]

use impatience::io::parse_grid;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = parse_grid(text) {
        assert!(g.len() >= 3);
        assert!(g.points().windows(2).all(|w| w[0] < w[1]));
    }
});
