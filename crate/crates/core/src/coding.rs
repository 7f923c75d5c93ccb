//! Two-part code lengths.
//!
//! The total cost of a corpus is the cost of writing the grammar down plus
//! the cost of the corpus encoded through the grammar's sentence
//! probabilities. A restriction in the grammar pays for itself once the
//! savings on the data side exceed its extra description cost; the crossover
//! scan locates where that happens on a concrete stream.
//!
//! # Grammar encoding scheme (frozen)
//!
//! Any fixed scheme works — description lengths in different schemes differ
//! by bounded constants — but golden values require one concrete choice:
//!
//! * Let `N` be the number of states (PFSG) or nonterminals (PCFG) and `T`
//!   the number of declared terminals. Each symbol slot costs
//!   `B = ceil(log2(N + T + 2))` bits (the `+2` covers the end marker and a
//!   stop slot).
//! * A rule with `k` right-hand-side symbols costs `(k + 2) * B` bits: source
//!   plus stop plus the right-hand side. PFSG transitions have `k = 2`
//!   (terminal, successor), end rules `k = 1`.
//! * Each source with `r` rules contributes `r - 1` free probability
//!   parameters at `param_bits` each (default 8); the last probability per
//!   source is implied by normalization.
//!
//! Worked floor example: the one-rule grammar `q0 : $end : 1.0` has
//! `N = 1, T = 0, B = ceil(log2 3) = 2`, one rule of arity 1 and no free
//! parameters, hence `L = (1 + 2) * 2 = 6` bits.

use crate::error::{Error, Result};
use crate::grammar::Grammar;
use crate::token::TokenSequence;

/// Knobs for the grammar encoding scheme.
#[derive(Debug, Clone, Copy)]
pub struct CodingConfig {
    /// Bits charged per free probability parameter.
    pub param_bits: u32,
}

impl Default for CodingConfig {
    fn default() -> Self {
        CodingConfig { param_bits: 8 }
    }
}

/// Description length of a grammar under the frozen scheme, in bits.
pub fn grammar_code_length(g: &Grammar, cfg: &CodingConfig) -> f64 {
    let base = (g.num_sources() + g.num_terminals() + 2) as f64;
    let b = base.log2().ceil();
    let symbol_bits: f64 = g
        .rule_arities()
        .iter()
        .map(|&arity| (arity as f64 + 2.0) * b)
        .sum();
    let param_bits: f64 = g
        .source_rule_counts()
        .iter()
        .map(|&r| ((r - 1) as f64) * f64::from(cfg.param_bits))
        .sum();
    symbol_bits + param_bits
}

/// Code length of a sentence-segmented corpus given a grammar: the sum of
/// per-sentence `-log2 p`. `+inf` as soon as any sentence is outside the
/// language. Also returns the per-sentence terms.
pub fn data_code_length(g: &Grammar, corpus: &TokenSequence) -> Result<(f64, Vec<f64>)> {
    if !corpus.is_segmented() {
        return Err(Error::InvalidParameter(
            "corpus ends mid-sentence; data code length needs complete sentences".into(),
        ));
    }
    let mut per_sentence = Vec::new();
    let mut total = 0.0;
    for sentence in corpus.sentences() {
        let s = TokenSequence::new(sentence.to_vec());
        let bits = g.sentence_log_loss(&s)?;
        per_sentence.push(bits);
        total += bits;
    }
    Ok((total, per_sentence))
}

/// Two-part code length report.
#[derive(Debug, Clone)]
pub struct CodeLengthReport {
    pub grammar_bits: f64,
    pub data_bits: f64,
    pub total_bits: f64,
    pub per_sentence_bits: Vec<f64>,
}

pub fn two_part_length(
    g: &Grammar,
    corpus: &TokenSequence,
    cfg: &CodingConfig,
) -> Result<CodeLengthReport> {
    let grammar_bits = grammar_code_length(g, cfg);
    let (data_bits, per_sentence_bits) = data_code_length(g, corpus)?;
    Ok(CodeLengthReport {
        grammar_bits,
        data_bits,
        total_bits: grammar_bits + data_bits,
        per_sentence_bits,
    })
}

/// Scans cumulative sentence prefixes of `stream` and returns the first
/// 1-based sentence index at which the challenger `g1`'s two-part total drops
/// strictly below the incumbent `g0`'s, or `None` if that never happens
/// within the stream.
pub fn crossover_point(
    g0: &Grammar,
    g1: &Grammar,
    stream: &TokenSequence,
    cfg: &CodingConfig,
) -> Result<Option<usize>> {
    let l0 = grammar_code_length(g0, cfg);
    let l1 = grammar_code_length(g1, cfg);
    let (_, per0) = data_code_length(g0, stream)?;
    let (_, per1) = data_code_length(g1, stream)?;
    let mut t0 = l0;
    let mut t1 = l1;
    for (i, (a, b)) in per0.iter().zip(per1.iter()).enumerate() {
        t0 += a;
        t1 += b;
        if t1 < t0 {
            return Ok(Some(i + 1));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse_grammar;

    const FLOOR: &str = "format: pfsg\nstart: q0\nq0 : $end : 1.0\n";

    #[test]
    fn floor_grammar_costs_six_bits() {
        let g = parse_grammar(FLOOR).unwrap();
        assert_eq!(grammar_code_length(&g, &CodingConfig::default()), 6.0);
    }

    #[test]
    fn adding_a_rule_never_decreases_length() {
        let small = parse_grammar(
            "format: pfsg\nstart: q0\nq0 : a -> q1 : 0.5\nq0 : $end : 0.5\nq1 : $end : 1.0\n",
        )
        .unwrap();
        let bigger = parse_grammar(
            "format: pfsg\nstart: q0\nq0 : a -> q1 : 0.5\nq0 : $end : 0.5\n\
             q1 : a -> q1 : 0.25\nq1 : $end : 0.75\n",
        )
        .unwrap();
        let cfg = CodingConfig::default();
        assert!(grammar_code_length(&bigger, &cfg) > grammar_code_length(&small, &cfg));
    }

    #[test]
    fn empty_corpus_costs_nothing() {
        let g = parse_grammar(FLOOR).unwrap();
        let (bits, per) = data_code_length(&g, &TokenSequence::default()).unwrap();
        assert_eq!(bits, 0.0);
        assert!(per.is_empty());
    }

    #[test]
    fn identical_grammars_never_cross() {
        let g0 = parse_grammar("format: pcfg\nstart: S\nS -> a S : 0.5\nS -> a : 0.5\n").unwrap();
        let g1 = g0.clone();
        let corpus = TokenSequence::from_corpus_text("a\na a\na\n");
        assert_eq!(
            crossover_point(&g0, &g1, &corpus, &CodingConfig::default()).unwrap(),
            None
        );
    }
}
