#![no_main]

use foliate::algebra::parse_poly;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(p) = parse_poly(s) {
            // printing must give text that parses back to the same value
            assert_eq!(parse_poly(&p.to_string()).ok(), Some(p));
        }
    }
});
