#![no_main]

use entropic_polygon::io::{decode_any, decode_state, encode_density, encode_vector, DiscreteState};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = decode_any(text);
    let Ok(state) = decode_state(text) else {
        return;
    };
    // accepted states re-encode to an equal state
    let encoded = match &state {
        DiscreteState::Vector(v) => encode_vector(v),
        DiscreteState::Density(d) => encode_density(d),
    };
    let text = serde_json::to_string(&encoded).expect("encodes");
    let back = decode_state(&text).expect("re-decodes");
    match (&state, &back) {
        (DiscreteState::Vector(a), DiscreteState::Vector(b)) => assert_eq!(a.amplitudes(), b.amplitudes()),
        (DiscreteState::Density(a), DiscreteState::Density(b)) => assert_eq!(a.entries(), b.entries()),
        _ => panic!("state kind changed on round trip"),
    }
});
