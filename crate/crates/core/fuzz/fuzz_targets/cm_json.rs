#![no_main]

use entropic_polygon::gaussian::symplectic_spectrum;
use entropic_polygon::io::{decode_cm, encode_cm};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(sigma) = decode_cm(text) else {
        return;
    };
    let text = serde_json::to_string(&encode_cm(&sigma)).expect("encodes");
    let back = decode_cm(&text).expect("re-decodes");
    assert_eq!(back.entries(), sigma.entries());
    // a decoded CM passed validation, so its spectrum exists and is ≥ 1 up to tolerance
    if let Ok(s) = symplectic_spectrum(&sigma) {
        assert!(s.values().iter().all(|&x| x >= 1.0 - 1e-6));
    }
});
