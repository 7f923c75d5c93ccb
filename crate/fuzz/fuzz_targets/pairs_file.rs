#![no_main]

use libfuzzer_sys::fuzz_target;
use simplicity_core::formmeaning::{parse_pairs, Inventory};

fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 16 {
        return;
    }
    if let Ok(text) = std::str::from_utf8(data) {
        let inventory = Inventory::parse("GREET\nFAREWELL\nBOTH\nA\nB\n").unwrap();
        if let Ok(pairs) = parse_pairs(text, &inventory) {
            for (sentence, label) in &pairs {
                assert!(!sentence.is_empty());
                assert!(*label < inventory.labels().len());
            }
        }
    }
});
