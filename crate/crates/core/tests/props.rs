//! Property tests for the distribution and coding invariants.

mod common;

use proptest::prelude::*;
use simplicity_core::coding::{data_code_length, CodingConfig};
use simplicity_core::grammar::{Grammar, Pfsg};
use simplicity_core::learnability::{occurrences_needed, years_needed};
use simplicity_core::learner::MixturePredictor;
use simplicity_core::token::{Token, TokenSequence};
use simplicity_core::corpus;

/// A random valid PFSG: every state carries an end rule, so all cycles leak.
/// Integer weights keep per-source sums within validation tolerance.
fn arb_pfsg() -> impl Strategy<Value = Pfsg> {
    let n_states = 1..4usize;
    let n_terms = 1..3usize;
    (n_states, n_terms)
        .prop_flat_map(|(ns, nt)| {
            let weights = proptest::collection::vec(1..6u32, ns * (nt * ns + 1));
            (Just(ns), Just(nt), weights)
        })
        .prop_map(|(ns, nt, weights)| {
            let mut text = String::from("format: pfsg\nstart: s0\n");
            let mut w = weights.into_iter();
            for s in 0..ns {
                let mut parts: Vec<(String, u32)> = Vec::new();
                parts.push(("$end".to_string(), w.next().unwrap()));
                for t in 0..nt {
                    for s2 in 0..ns {
                        let wt = w.next().unwrap();
                        if wt > 2 {
                            parts.push((format!("t{t} -> s{s2}"), wt));
                        }
                    }
                }
                let total: u32 = parts.iter().map(|p| p.1).sum();
                for (body, wt) in parts {
                    let p = f64::from(wt) / f64::from(total);
                    if body == "$end" {
                        text.push_str(&format!("s{s} : $end : {p}\n"));
                    } else {
                        text.push_str(&format!("s{s} : {body} : {p}\n"));
                    }
                }
            }
            match simplicity_core::parse_grammar(&text).expect("constructed grammar is valid") {
                Grammar::Pfsg(g) => g,
                _ => unreachable!(),
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn next_dist_sums_to_one_on_sampled_prefixes(g in arb_pfsg(), seed in 0u64..1000, len in 0usize..12) {
        let (stream, _) = Grammar::Pfsg(g.clone()).generate(seed, len);
        let prefix = TokenSequence::new(stream.tokens().to_vec());
        let d = g.next_symbol_dist(&prefix).unwrap();
        let sum: f64 = d.iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn chain_rule_decomposes_sentence_loss(g in arb_pfsg(), seed in 0u64..1000) {
        let (stream, _) = Grammar::Pfsg(g.clone()).generate(seed, 16);
        let first = stream.sentences().next().map(|s| s.to_vec());
        if let Some(sentence) = first {
            let s = TokenSequence::new(sentence);
            let loss = g.sentence_log_loss(&s).unwrap();
            let mut sum = 0.0;
            let mut prefix = TokenSequence::default();
            for tok in s.tokens() {
                let d = g.next_symbol_dist(&prefix).unwrap();
                sum -= d[g.symbol_id(tok).unwrap()].log2();
                prefix.push(tok.clone());
            }
            prop_assert!((loss - sum).abs() < 1e-9);
        }
    }

    #[test]
    fn grammaticality_iff_finite_loss(g in arb_pfsg(), tokens in proptest::collection::vec(0usize..2, 0..6)) {
        let grammar = Grammar::Pfsg(g.clone());
        let words: Vec<String> = tokens
            .iter()
            .filter_map(|&t| g.alphabet().get(t).cloned())
            .collect();
        let mut s = TokenSequence::default();
        for word in &words {
            s.push(Token::word(word));
        }
        s.push(Token::End);
        let loss = grammar.sentence_log_loss(&s).unwrap();
        prop_assert_eq!(grammar.is_grammatical(&s), loss.is_finite());
    }

    #[test]
    fn appending_sentences_never_shrinks_data_bits(g in arb_pfsg(), seeds in proptest::collection::vec(0u64..500, 1..5)) {
        let grammar = Grammar::Pfsg(g);
        let mut corpus = TokenSequence::default();
        let mut last = 0.0;
        for seed in seeds {
            let (stream, _) = grammar.generate(seed, 8);
            for sentence in stream.sentences() {
                corpus.extend(&TokenSequence::new(sentence.to_vec()));
            }
            let (bits, _) = data_code_length(&grammar, &corpus).unwrap();
            prop_assert!(bits >= last - 1e-12);
            last = bits;
        }
    }

    #[test]
    fn posterior_sums_to_one_after_updates(seed in 0u64..1000, len in 1usize..24) {
        let members = vec![
            ("a".to_string(), match simplicity_core::parse_grammar(
                "format: pfsg\nstart: q0\nq0 : x -> q0 : 0.25\nq0 : y -> q0 : 0.25\nq0 : $end : 0.5\n").unwrap() {
                Grammar::Pfsg(g) => g, _ => unreachable!() }),
            ("b".to_string(), match simplicity_core::parse_grammar(
                "format: pfsg\nstart: q0\nq0 : x -> q0 : 0.5\nq0 : y -> q0 : 0.25\nq0 : $end : 0.25\n").unwrap() {
                Grammar::Pfsg(g) => g, _ => unreachable!() }),
        ];
        let mut m = MixturePredictor::new(members, None, &CodingConfig::default()).unwrap();
        let (stream, _) = Grammar::Pfsg(match simplicity_core::parse_grammar(
            "format: pfsg\nstart: q0\nq0 : x -> q0 : 0.3\nq0 : y -> q0 : 0.3\nq0 : $end : 0.4\n").unwrap() {
            Grammar::Pfsg(g) => g, _ => unreachable!() }).generate(seed, len);
        m.update_sequence(&stream).unwrap();
        let sum: f64 = m.posterior().iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn duplicating_a_corpus_preserves_rates(lines in proptest::collection::vec("[ab]( [ab]){0,3}", 1..6)) {
        let text = lines.join("\n") + "\n";
        let single = corpus::ingest_bytes(text.as_bytes()).unwrap();
        let double = corpus::ingest_bytes((text.clone() + &text).as_bytes()).unwrap();
        let pat = corpus::TokenPattern::parse("a").unwrap();
        let c1 = corpus::count_matches(&single, &pat);
        let c2 = corpus::count_matches(&double, &pat);
        prop_assert_eq!(c2, 2 * c1);
        if single.word_count > 0 {
            let r1 = corpus::per_million(c1, single.word_count).unwrap();
            let r2 = corpus::per_million(c2, double.word_count).unwrap();
            prop_assert!((r1 - r2).abs() < 1e-9);
        }
    }

    #[test]
    fn pattern_counts_add_over_concatenation(a in proptest::collection::vec("[ab]( [ab]){0,3}", 1..4),
                                             b in proptest::collection::vec("[ab]( [ab]){0,3}", 1..4)) {
        let ta = a.join("\n") + "\n";
        let tb = b.join("\n") + "\n";
        let pat = corpus::TokenPattern::parse("a *").unwrap();
        let ca = corpus::count_matches(&corpus::ingest_bytes(ta.as_bytes()).unwrap(), &pat);
        let cb = corpus::count_matches(&corpus::ingest_bytes(tb.as_bytes()).unwrap(), &pat);
        let cab = corpus::count_matches(&corpus::ingest_bytes((ta + &tb).as_bytes()).unwrap(), &pat);
        prop_assert_eq!(cab, ca + cb);
    }

    #[test]
    fn occurrences_monotone(delta in 1.0f64..200.0, q1 in 0.05f64..0.9, bump in 0.01f64..0.09) {
        let base = occurrences_needed(delta, q1).unwrap();
        let more_delta = occurrences_needed(delta + 10.0, q1).unwrap();
        prop_assert!(more_delta >= base);
        let more_q = occurrences_needed(delta, (q1 + bump).min(0.99)).unwrap();
        prop_assert!(more_q <= base);
    }

    #[test]
    fn years_monotone(n in 1.0f64..1e6, rate in 1.0f64..1e4, wpy in 1e5f64..1e8) {
        let base = years_needed(n, rate, wpy).unwrap();
        prop_assert!(years_needed(n, rate * 2.0, wpy).unwrap() <= base);
        prop_assert!(years_needed(n, rate, wpy * 2.0).unwrap() <= base);
    }
}
