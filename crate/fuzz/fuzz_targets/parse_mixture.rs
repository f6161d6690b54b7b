#![no_main]

use impatience::io::{mixture_to_json, parse_mixture};
use impatience::mixture::mixture_rate;
use impatience::Discount;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(m) = parse_mixture(text) else { return };
    let again = parse_mixture(&mixture_to_json(&m)).expect("serialized mixture parses");
    assert_eq!(again.len(), m.len());
    let w: f64 = m.weights().iter().sum();
    assert!((w - 1.0).abs() < 1e-9);
    let t = m.domain().0.max(1e-3);
    let _ = m.value(t);
    let _ = mixture_rate(&m, t);
});
