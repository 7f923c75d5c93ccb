#![no_main]

use libfuzzer_sys::fuzz_target;
use simplicity_core::formmeaning::{Inventory, JointHypothesis};

fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 16 {
        return;
    }
    if let Ok(text) = std::str::from_utf8(data) {
        let inventory = Inventory::parse("GREET\nFAREWELL\nBOTH\n").unwrap();
        let rows = vec![
            vec!["bye".to_string()],
            vec!["hi".to_string()],
            vec!["hi".to_string(), "bye".to_string()],
        ];
        let cfg = simplicity_core::CodingConfig::default();
        if let Ok(table) =
            JointHypothesis::parse("fuzz".into(), text, &rows, &inventory, &cfg)
        {
            let total: f64 = table.cells().iter().sum();
            assert!((total - 1.0).abs() <= 1e-6);
        }
    }
});
