#![no_main]

use entropic_polygon::relations::{Relation, SystemSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(system) = s.parse::<SystemSpec>() {
        let again: SystemSpec = system.to_string().parse().expect("canonical form parses");
        assert_eq!(again, system);
        assert!(system.n_parties() >= 2);
    }
    let _ = s.parse::<Relation>();
});
