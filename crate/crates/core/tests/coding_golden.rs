//! Golden values for the frozen grammar encoding scheme and the crossover
//! analysis of the Hi!/Bye! pair.
//!
//! Hand derivation of the pair (param_bits = 8):
//!
//! iid.g: 1 state, 2 terminals -> B = ceil(log2 5) = 3.
//!   symbols: two transitions (4B each) + one end rule (3B) = 33 bits;
//!   q0 has 3 rules -> 2 free parameters = 16 bits; L = 49.
//! alternation.g: 3 states, 2 terminals -> B = ceil(log2 7) = 3.
//!   symbols: three transitions (4B) + one end rule (3B) = 45 bits;
//!   q2 has 2 rules -> 1 free parameter = 8 bits; L = 53.
//!
//! On the stream of "Hi! Bye!" sentences:
//!   iid data cost/sentence   = -log2(0.25 * 0.25 * 0.5) = 5 bits,
//!   alternation cost/sentence = -log2(1 * 1 * 0.25)      = 2 bits,
//!   savings 3 bits/sentence, extra grammar cost 4 bits.
//! Totals: 49 + 5n vs 53 + 2n. n = 1: 54 < 55 (iid wins strictly);
//! n >= 2: 53 + 2n < 49 + 5n (alternation wins strictly).
//! Crossover index = 2 = ceil(4 / 3) = ceil(delta_L / savings).

mod common;

use common::*;
use simplicity_core::coding::{
    crossover_point, data_code_length, grammar_code_length, two_part_length, CodingConfig,
};
use simplicity_core::grammar::Grammar;
use simplicity_core::token::TokenSequence;

fn cfg() -> CodingConfig {
    CodingConfig::default()
}

#[test]
fn golden_grammar_lengths() {
    assert_eq!(grammar_code_length(&load_grammar("hibye/iid.g"), &cfg()), 49.0);
    assert_eq!(
        grammar_code_length(&load_grammar("hibye/alternation.g"), &cfg()),
        53.0
    );
    assert_eq!(
        grammar_code_length(&load_grammar("hibye/alternation_strict.g"), &cfg()),
        33.0
    );
    assert_eq!(
        grammar_code_length(&load_grammar("contraction/overgeneral.g"), &cfg()),
        104.0
    );
    assert_eq!(
        grammar_code_length(&load_grammar("contraction/restricted.g"), &cfg()),
        120.0
    );
}

#[test]
fn alternation_costs_more_than_iid() {
    let l_iid = grammar_code_length(&load_grammar("hibye/iid.g"), &cfg());
    let l_alt = grammar_code_length(&load_grammar("hibye/alternation.g"), &cfg());
    assert!(l_alt > l_iid);
}

#[test]
fn param_bits_knob_moves_lengths() {
    let g = load_grammar("hibye/iid.g");
    let l8 = grammar_code_length(&g, &CodingConfig { param_bits: 8 });
    let l16 = grammar_code_length(&g, &CodingConfig { param_bits: 16 });
    assert_eq!(l16 - l8, 16.0); // two free parameters
}

#[test]
fn one_bit_per_single_token_sentence() {
    // With the end marker folded into the deterministic second state, each
    // single-token sentence costs exactly one bit.
    let g = simplicity_core::parse_grammar(
        "format: pfsg\nstart: q0\nq0 : Hi! -> q1 : 0.5\nq0 : Bye! -> q1 : 0.5\nq1 : $end : 1.0\n",
    )
    .unwrap();
    let corpus = TokenSequence::from_corpus_text("Hi!\nBye!\nHi!\nHi!\nBye!\nHi!\nBye!\n");
    let (bits, per) = data_code_length(&g, &corpus).unwrap();
    assert_eq!(bits, 7.0);
    assert!(per.iter().all(|&b| b == 1.0));
}

#[test]
fn alternation_encodes_its_own_output_for_free() {
    let g = load_grammar("hibye/alternation_strict.g");
    let corpus = TokenSequence::from_corpus_text(&load_fixture("hibye/stream.txt"));
    let (bits, _) = data_code_length(&g, &corpus).unwrap();
    assert_eq!(bits, 0.0);
}

#[test]
fn report_total_is_exact_sum() {
    let g = load_grammar("hibye/iid.g");
    let corpus = TokenSequence::from_corpus_text(&load_fixture("hibye/stream.txt"));
    let report = two_part_length(&g, &corpus, &cfg()).unwrap();
    assert_eq!(report.total_bits, report.grammar_bits + report.data_bits);
    let per_sum: f64 = report.per_sentence_bits.iter().sum();
    assert!((report.data_bits - per_sum).abs() < 1e-6);
}

#[test]
fn hi_bye_crossover_is_at_sentence_two() {
    let g0 = load_grammar("hibye/iid.g");
    let g1 = load_grammar("hibye/alternation.g");
    let stream = TokenSequence::from_corpus_text(&load_fixture("hibye/stream.txt"));
    let crossover = crossover_point(&g0, &g1, &stream, &cfg()).unwrap();
    assert_eq!(crossover, Some(2));

    // Strictness on both sides of the crossover.
    let (_, per0) = data_code_length(&g0, &stream).unwrap();
    let (_, per1) = data_code_length(&g1, &stream).unwrap();
    let l0 = grammar_code_length(&g0, &cfg());
    let l1 = grammar_code_length(&g1, &cfg());
    let mut t0 = l0;
    let mut t1 = l1;
    for n in 0..stream.sentence_count() {
        t0 += per0[n];
        t1 += per1[n];
        if n + 1 < 2 {
            assert!(t0 < t1, "iid must win strictly before the crossover");
        } else {
            assert!(t1 < t0, "alternation must win strictly from the crossover on");
        }
    }

    // The closed form: savings 3 bits/sentence, extra grammar cost 4 bits.
    assert_eq!(((l1 - l0) / 3.0).ceil(), 2.0);
}

#[test]
fn crossover_never_decreases_under_padding() {
    // Padding the challenger with unreachable (but well-formed) states makes
    // it strictly more expensive and can only delay the crossover.
    let base = load_fixture("hibye/alternation.g");
    let g0 = load_grammar("hibye/iid.g");
    let stream = TokenSequence::from_corpus_text(&"Hi! Bye!\n".repeat(80));
    let mut last = 0usize;
    for pads in 0..4 {
        let mut text = base.clone();
        for i in 0..pads {
            text.push_str(&format!("pad{i} : Hi! -> pad{i} : 0.5\npad{i} : $end : 0.5\n"));
        }
        let g1 = simplicity_core::parse_grammar(&text).unwrap();
        let crossover = crossover_point(&g0, &g1, &stream, &cfg())
            .unwrap()
            .expect("crossover stays finite on this stream");
        assert!(
            crossover >= last,
            "padding decreased the crossover: {crossover} < {last}"
        );
        last = crossover;
    }
    assert!(last > 2, "three pads must push the crossover past 2");
}

#[test]
fn renormalization_savings_are_exactly_log_inverse_mass() {
    // g1 is g0 conditioned on "no end at q1" (disallowed mass q = 0.5), so
    // every sentence saves exactly log2(1/(1-q)) = 1 bit.
    let g0 = load_grammar("renorm/g0.g");
    let g1 = load_grammar("renorm/g1.g");
    for words in ["a c", "b c"] {
        let s = TokenSequence::sentence(words);
        let b0 = g0.sentence_log_loss(&s).unwrap();
        let b1 = g1.sentence_log_loss(&s).unwrap();
        assert!(
            ((b0 - b1) - 1.0).abs() < 1e-9,
            "{words}: savings {} != 1",
            b0 - b1
        );
    }

    // A 0.75-mass variant saves exactly 2 bits per sentence.
    let h0 = simplicity_core::parse_grammar(
        "format: pfsg\nstart: q0\nq0 : a -> q1 : 1.0\nq1 : $end : 0.75\nq1 : c -> q2 : 0.25\nq2 : $end : 1.0\n",
    )
    .unwrap();
    let h1 = simplicity_core::parse_grammar(
        "format: pfsg\nstart: q0\nq0 : a -> q1 : 1.0\nq1 : c -> q2 : 1.0\nq2 : $end : 1.0\n",
    )
    .unwrap();
    let s = TokenSequence::sentence("a c");
    let b0 = h0.sentence_log_loss(&s).unwrap();
    let b1 = h1.sentence_log_loss(&s).unwrap();
    assert!(((b0 - b1) - 2.0).abs() < 1e-9);
}

#[test]
fn contraction_crossover_matches_occurrence_count() {
    // Every "he s tall" sentence saves exactly one bit; the restriction
    // costs 16 extra bits, so it first wins strictly at sentence 17.
    let g0 = load_grammar("contraction/overgeneral.g");
    let g1 = load_grammar("contraction/restricted.g");
    let corpus = TokenSequence::from_corpus_text(&"he s tall\n".repeat(30));
    assert_eq!(crossover_point(&g0, &g1, &corpus, &cfg()).unwrap(), Some(17));
}

#[test]
fn data_code_length_is_monotone_in_the_corpus() {
    let g = load_grammar("hibye/iid.g");
    let mut corpus = TokenSequence::default();
    let mut last = 0.0;
    for _ in 0..5 {
        corpus.extend(&TokenSequence::sentence("Hi! Bye!"));
        let (bits, _) = data_code_length(&g, &corpus).unwrap();
        assert!(bits >= last);
        last = bits;
    }
}

#[test]
fn ungrammatical_sentence_makes_data_bits_infinite() {
    let g = load_grammar("hibye/alternation_strict.g");
    let corpus = TokenSequence::from_corpus_text("Hi! Bye!\nBye! Bye!\n");
    let (bits, per) = data_code_length(&g, &corpus).unwrap();
    assert!(bits.is_infinite());
    assert_eq!(per[0], 0.0);
    assert!(per[1].is_infinite());
}

#[test]
fn grammar_check_catches_oov_in_data() {
    let g = load_grammar("hibye/iid.g");
    let corpus = TokenSequence::from_corpus_text("Hi! Howdy!\n");
    match data_code_length(&g, &corpus) {
        Err(simplicity_core::Error::OutOfVocabulary { token }) => {
            assert_eq!(token, "Howdy!");
        }
        other => panic!("expected OutOfVocabulary, got {other:?}"),
    }
}

#[test]
fn floor_grammar_golden_value() {
    let g = simplicity_core::parse_grammar("format: pfsg\nstart: q0\nq0 : $end : 1.0\n").unwrap();
    assert_eq!(grammar_code_length(&g, &cfg()), 6.0);
    // Its only sentence is empty and costs nothing.
    let (bits, _) =
        data_code_length(&g, &TokenSequence::from_corpus_text("\n")).unwrap();
    assert_eq!(bits, 0.0);
    let empty_sentence = TokenSequence::new(vec![simplicity_core::Token::End]);
    assert_eq!(Grammar::sentence_log_loss(&g, &empty_sentence).unwrap(), 0.0);
}
