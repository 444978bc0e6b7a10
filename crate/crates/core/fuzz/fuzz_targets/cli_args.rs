#![no_main]

use entropic_polygon::cli::parse_args;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    let argv = std::iter::once("entropic-polygon").chain(s.split('\0'));
    // argument parsing only; commands are not run
    let _ = parse_args(argv);
});
