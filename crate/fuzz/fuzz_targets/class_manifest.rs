#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 16 {
        return;
    }
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(entries) = simplicity_core::learner::parse_manifest(text) {
            assert!(!entries.is_empty());
            let with_prior = entries.iter().filter(|e| e.prior.is_some()).count();
            assert!(with_prior == 0 || with_prior == entries.len());
        }
    }
});
