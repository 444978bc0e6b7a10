#![no_main]

use entropic_polygon::entropy::EntropySpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(spec) = s.parse::<EntropySpec>() {
        // Display is the canonical form and must parse back to the same spec.
        let again: EntropySpec = spec.to_string().parse().expect("canonical form parses");
        assert_eq!(again, spec);
    }
    let _ = EntropySpec::parse_with_base(s, std::f64::consts::E);
});
