#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 16 {
        return;
    }
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(inv) = simplicity_core::formmeaning::Inventory::parse(text) {
            assert!(!inv.labels().is_empty());
        }
    }
});
