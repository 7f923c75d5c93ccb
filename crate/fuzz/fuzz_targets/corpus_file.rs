#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 16 {
        return;
    }
    // Both ingestion paths must agree and never panic; invalid UTF-8 must be
    // reported, not crash.
    let by_bytes = simplicity_core::corpus::ingest_bytes(data);
    let by_reader = simplicity_core::corpus::ingest_reader(data);
    match (by_bytes, by_reader) {
        (Ok(a), Ok(b)) => {
            assert_eq!(a, b);
            if a.word_count > 0 {
                let pat = simplicity_core::corpus::TokenPattern::parse("a *").unwrap();
                let count = simplicity_core::corpus::count_matches(&a, &pat);
                let _ = simplicity_core::corpus::per_million(count, a.word_count).unwrap();
            }
        }
        (Err(_), Err(_)) => {}
        _ => panic!("ingestion paths disagree on validity"),
    }
    let _ = simplicity_core::TokenSequence::from_corpus_bytes(data);
});
