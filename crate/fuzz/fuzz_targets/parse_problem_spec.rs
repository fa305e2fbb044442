#![no_main]

use foliate_cli::load_spec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(spec) = load_spec(s) {
            let _ = spec.validate();
        }
    }
});
