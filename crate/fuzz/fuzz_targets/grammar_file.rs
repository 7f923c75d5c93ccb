//! Grammar files are untrusted input: parsing and validation must never
//! panic, and a grammar that validates must survive basic use.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 16 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(grammar) = simplicity_core::parse_grammar(text) {
        // A validated grammar must support scoring and bounded sampling
        // without panicking.
        let cfg = simplicity_core::CodingConfig::default();
        let bits = simplicity_core::coding::grammar_code_length(&grammar, &cfg);
        assert!(bits > 0.0);
        let (stream, _) = grammar.generate(7, 48);
        for sentence in stream.sentences() {
            let s = simplicity_core::TokenSequence::new(sentence.to_vec());
            let loss = grammar.sentence_log_loss(&s).expect("in-vocabulary");
            assert!(loss >= -1e-9, "sampled sentence got negative loss {loss}");
        }
    }
});
