#![no_main]

use impatience::ce::{ce_hyperbolic_rate, weighted_harmonic_mean};
use impatience::io::parse_bundle;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(b) = parse_bundle(text) else { return };
    let lim = weighted_harmonic_mean(&b);
    for t in [1e-12, 1e-3, 1.0, 1e6] {
        let h = ce_hyperbolic_rate(&b, t).expect("positive time").h;
        assert!(h >= lim * (1.0 - 1e-12) || !h.is_finite(), "h({t}) = {h} below {lim}");
    }
});
