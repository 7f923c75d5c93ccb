#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 12 {
        return;
    }
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(pat) = simplicity_core::corpus::TokenPattern::parse(text) {
            assert!(!pat.is_empty());
        }
    }
});
