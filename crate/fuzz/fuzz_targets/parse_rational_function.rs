#![no_main]

use foliate::algebra::parse_rational_function;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = parse_rational_function(s);
    }
});
