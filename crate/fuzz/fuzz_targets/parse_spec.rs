//! Spec JSON from untrusted input: parsing must not panic, and accepted specs
//! must round-trip and evaluate inside their domain.

#![no_main]

use impatience::io::{parse_spec, spec_to_json};
use impatience::{DerivativeMode, Discount};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = parse_spec(text) else { return };
    let again = parse_spec(&spec_to_json(&spec)).expect("serialized spec parses");
    assert_eq!(again, spec);
    let (lo, hi) = spec.domain();
    for t in [lo, 0.5 * (lo + hi.min(1e3)), hi.min(1e3)] {
        if let Ok(d) = spec.value(t) {
            assert!((0.0..=1.0).contains(&d), "D({t}) = {d}");
        }
        let _ = spec.rates(t, DerivativeMode::Analytic);
        let _ = spec.rates(t, DerivativeMode::finite_difference());
    }
});
