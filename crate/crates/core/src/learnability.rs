//! Three-factor learnability estimates.
//!
//! Given an overgeneral grammar `g0`, a restricted grammar `g1`, and corpus
//! statistics, estimate how much input makes the restriction pay off:
//!
//! 1. extra description cost of the restriction,
//!    `delta = L(g1) - L(g0)` bits;
//! 2. conditional mass `q` that `g0` spends on forms `g1` forbids in the
//!    relevant context — when `g1` is `g0` renormalized within that context,
//!    every occurrence saves exactly `log2(1/(1-q))` bits;
//! 3. how often the context occurs in real input, which converts the needed
//!    occurrence count into years of exposure.

use crate::coding::{data_code_length, grammar_code_length, CodingConfig};
use crate::corpus::{count_matches, CorpusStats, TokenPattern};
use crate::error::{Error, Result};
use crate::grammar::Grammar;
use crate::token::TokenSequence;

/// Where a restriction applies: an explicit token prefix, or a named state
/// that must exist in both grammars.
#[derive(Debug, Clone)]
pub enum ContextSpec {
    Prefix(TokenSequence),
    State(String),
}

/// Default yearly input volume in words; a documented convention, exposed as
/// a knob, not an empirical claim.
pub const DEFAULT_WORDS_PER_YEAR: f64 = 10_000_000.0;

#[derive(Debug, Clone)]
pub struct LearnabilityEstimate {
    pub delta_grammar_bits: f64,
    pub disallowed_mass_q: f64,
    pub savings_bits_per_occurrence: f64,
    /// `+inf` when the restriction never pays off.
    pub occurrences_needed: f64,
    pub context_rate_per_million_words: f64,
    pub words_per_year: f64,
    pub years_needed: f64,
    /// "closed_form" when the renormalization structure was verified,
    /// "empirical" when savings were measured on the corpus instead.
    pub method: &'static str,
    /// Set when delta <= 0 (the restriction is free or cheaper).
    pub delta_warning: bool,
}

/// Factor (1): extra description cost of the restricted grammar.
/// Negative or zero deltas are flagged, not rejected.
pub fn rule_complexity_delta(g0: &Grammar, g1: &Grammar, cfg: &CodingConfig) -> (f64, bool) {
    let delta = grammar_code_length(g1, cfg) - grammar_code_length(g0, cfg);
    (delta, delta <= 0.0)
}

fn conditional_in_context(g: &Grammar, context: &ContextSpec) -> Result<Vec<f64>> {
    let pfsg = g.as_pfsg()?;
    match context {
        ContextSpec::Prefix(prefix) => pfsg.next_symbol_dist(prefix),
        ContextSpec::State(name) => {
            let id = pfsg
                .state_id(name)
                .ok_or_else(|| Error::UndeclaredSymbol {
                    name: name.clone(),
                    line: 0,
                })?;
            let mut fwd = vec![0.0; pfsg.num_states()];
            fwd[id] = 1.0;
            Ok(pfsg.next_dist(&fwd))
        }
    }
}

/// Aligns g1's conditional onto g0's symbol ids. Both grammars must declare
/// the same terminal set.
fn aligned_conditionals(
    g0: &Grammar,
    g1: &Grammar,
    context: &ContextSpec,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let p0 = conditional_in_context(g0, context)?;
    let p1 = conditional_in_context(g1, context)?;
    let f0 = g0.as_pfsg()?;
    let f1 = g1.as_pfsg()?;
    let mut aligned1 = vec![0.0; p0.len()];
    for (local, &p) in p1.iter().enumerate() {
        let idx = if local == f1.end_symbol() {
            f0.end_symbol()
        } else {
            f0.term_id(&f1.alphabet()[local])
                .ok_or_else(|| Error::AlphabetMismatch {
                    expected: f0.alphabet().join(", "),
                    found: f1.alphabet().join(", "),
                    name: "g1".into(),
                })?
        };
        aligned1[idx] = p;
    }
    Ok((p0, aligned1))
}

/// Factor (2): conditional probability mass that g0 gives to continuations
/// g1 forbids in the context. Errors when g1 allows something g0 forbids
/// there (the pair is not overgeneral/restricted for this context).
pub fn disallowed_mass(g0: &Grammar, g1: &Grammar, context: &ContextSpec) -> Result<f64> {
    let (p0, p1) = aligned_conditionals(g0, g1, context)?;
    let mut q = 0.0;
    for k in 0..p0.len() {
        if p1[k] > 0.0 && p0[k] == 0.0 {
            return Err(Error::SupportViolation {
                detail: format!(
                    "g1 allows a continuation (outcome {k}) that g0 forbids in this context"
                ),
            });
        }
        if p1[k] == 0.0 {
            q += p0[k];
        }
    }
    Ok(q)
}

/// True when g1's conditional in the context equals g0's conditional
/// renormalized over g1's support, within 1e-9.
fn is_renormalization(g0: &Grammar, g1: &Grammar, context: &ContextSpec) -> Result<bool> {
    let (p0, p1) = aligned_conditionals(g0, g1, context)?;
    let allowed_mass: f64 = (0..p0.len())
        .map(|k| if p1[k] > 0.0 { p0[k] } else { 0.0 })
        .sum();
    if allowed_mass == 0.0 {
        return Ok(false);
    }
    Ok((0..p0.len()).all(|k| {
        let renorm = if p1[k] > 0.0 { p0[k] / allowed_mass } else { 0.0 };
        (renorm - p1[k]).abs() <= 1e-9
    }))
}

/// Occurrences of the relevant context needed before the restriction's data
/// savings cover its description cost: `ceil(delta / log2(1/(1-q)))`.
/// Zero delta needs zero occurrences; `q = 0` saves nothing, so the answer
/// is `+inf`.
pub fn occurrences_needed(delta_bits: f64, q: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!(
            "disallowed mass q = {q} outside [0, 1)"
        )));
    }
    if delta_bits < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "delta must be nonnegative, got {delta_bits}"
        )));
    }
    if delta_bits == 0.0 {
        return Ok(0.0);
    }
    let savings = (1.0 / (1.0 - q)).log2();
    if savings == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((delta_bits / savings).ceil())
}

/// Factor (3): occurrences to years, given how often the context appears.
pub fn years_needed(n_star: f64, rate_per_million_words: f64, words_per_year: f64) -> Result<f64> {
    if words_per_year.is_nan() || words_per_year <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "words_per_year must be positive, got {words_per_year}"
        )));
    }
    if rate_per_million_words < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "rate must be nonnegative, got {rate_per_million_words}"
        )));
    }
    if n_star.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if n_star == 0.0 {
        return Ok(0.0);
    }
    let contexts_per_year = rate_per_million_words * words_per_year / 1e6;
    if contexts_per_year == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(n_star / contexts_per_year)
}

/// Full three-factor estimate. When the pair is a renormalization pair in
/// every supplied context (and the contexts agree on `q` within 1e-9), the
/// closed-form per-occurrence savings applies; otherwise savings are
/// measured empirically on the corpus as mean code-length difference per
/// context occurrence.
#[allow(clippy::too_many_arguments)]
pub fn learnability_report(
    g0: &Grammar,
    g1: &Grammar,
    contexts: &[ContextSpec],
    stats: &CorpusStats,
    pattern: &TokenPattern,
    corpus: Option<&TokenSequence>,
    words_per_year: f64,
    cfg: &CodingConfig,
) -> Result<LearnabilityEstimate> {
    if contexts.is_empty() {
        return Err(Error::InvalidParameter("no context supplied".into()));
    }
    let (delta, delta_warning) = rule_complexity_delta(g0, g1, cfg);
    if delta_warning {
        log::warn!("restriction delta is {delta} bits (not positive); reporting 0 occurrences");
    }

    let qs: Vec<f64> = contexts
        .iter()
        .map(|c| disallowed_mass(g0, g1, c))
        .collect::<Result<_>>()?;
    let q = qs[0];
    let qs_agree = qs.iter().all(|&x| (x - q).abs() <= 1e-9);
    let mut renorm = qs_agree;
    if renorm {
        for c in contexts {
            if !is_renormalization(g0, g1, c)? {
                renorm = false;
                break;
            }
        }
    }

    let count = count_matches(stats, pattern);
    let rate = if stats.word_count == 0 {
        return Err(Error::ZeroWordCorpus);
    } else {
        count as f64 * 1e6 / stats.word_count as f64
    };

    let (savings, occurrences, method): (f64, f64, &'static str) = if renorm {
        let savings = (1.0 / (1.0 - q)).log2();
        let occ = if delta <= 0.0 {
            0.0
        } else {
            occurrences_needed(delta, q)?
        };
        (savings, occ, "closed_form")
    } else {
        let corpus = corpus.ok_or_else(|| {
            Error::InvalidParameter(
                "pair is not a renormalization pair; empirical savings need the corpus text"
                    .into(),
            )
        })?;
        let (bits0, _) = data_code_length(g0, corpus)?;
        let (bits1, _) = data_code_length(g1, corpus)?;
        if count == 0 {
            (0.0, f64::INFINITY, "empirical")
        } else {
            let savings = (bits1 - bits0) / count as f64; // g0 is overgeneral: bits1 <= bits0 on its support
            let savings = -savings;
            let occ = if delta <= 0.0 {
                0.0
            } else if savings <= 0.0 {
                f64::INFINITY
            } else {
                (delta / savings).ceil()
            };
            (savings, occ, "empirical")
        }
    };

    let years = years_needed(occurrences, rate, words_per_year)?;
    Ok(LearnabilityEstimate {
        delta_grammar_bits: delta,
        disallowed_mass_q: q,
        savings_bits_per_occurrence: savings,
        occurrences_needed: occurrences,
        context_rate_per_million_words: rate,
        words_per_year,
        years_needed: years,
        method,
        delta_warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse_grammar;

    #[test]
    fn occurrence_arithmetic() {
        assert_eq!(occurrences_needed(20.0, 0.5).unwrap(), 20.0);
        assert_eq!(occurrences_needed(20.0, 0.75).unwrap(), 10.0);
        assert_eq!(occurrences_needed(20.0, 0.0).unwrap(), f64::INFINITY);
        assert_eq!(occurrences_needed(0.0, 0.5).unwrap(), 0.0);
        assert!(occurrences_needed(1.0, 1.0).is_err());
    }

    #[test]
    fn years_arithmetic() {
        assert!((years_needed(1000.0, 500.0, 1e7).unwrap() - 0.2).abs() < 1e-12);
        assert_eq!(years_needed(10.0, 0.0, 1e7).unwrap(), f64::INFINITY);
        assert!(years_needed(10.0, 5.0, 0.0).is_err());
        let once = years_needed(100.0, 50.0, 1e7).unwrap();
        let halved = years_needed(100.0, 50.0, 5e6).unwrap();
        assert!((halved - 2.0 * once).abs() < 1e-12);
    }

    #[test]
    fn delta_is_antisymmetric() {
        let g0 = parse_grammar(
            "format: pfsg\nstart: q0\nq0 : a -> q1 : 0.5\nq0 : b -> q1 : 0.5\nq1 : $end : 1.0\n",
        )
        .unwrap();
        let g1 = parse_grammar(
            "format: pfsg\nstart: q0\nq0 : a -> q1 : 0.5\nq0 : b -> q1 : 0.5\n\
             q1 : a -> q1 : 0.5\nq1 : $end : 0.5\n",
        )
        .unwrap();
        let cfg = CodingConfig::default();
        let (d01, _) = rule_complexity_delta(&g0, &g1, &cfg);
        let (d10, _) = rule_complexity_delta(&g1, &g0, &cfg);
        assert_eq!(d01, -d10);
        let (dss, warned) = rule_complexity_delta(&g0, &g0, &cfg);
        assert_eq!(dss, 0.0);
        assert!(warned);
    }

    #[test]
    fn disallowed_mass_identity_is_zero() {
        let g = parse_grammar(
            "format: pfsg\nstart: q0\nq0 : a -> q1 : 0.5\nq0 : b -> q1 : 0.5\nq1 : $end : 1.0\n",
        )
        .unwrap();
        let ctx = ContextSpec::Prefix(TokenSequence::default());
        assert_eq!(disallowed_mass(&g, &g, &ctx).unwrap(), 0.0);
    }

    #[test]
    fn support_violation_detected() {
        let g0 = parse_grammar(
            "format: pfsg\nstart: q0\nq0 : a -> q1 : 1.0\nq1 : $end : 1.0\n",
        )
        .unwrap();
        let g1 = parse_grammar(
            "format: pfsg\nstart: q0\nq0 : a -> q1 : 0.5\nq0 : b -> q1 : 0.5\nq1 : $end : 1.0\n",
        )
        .unwrap();
        let ctx = ContextSpec::Prefix(TokenSequence::default());
        assert!(matches!(
            disallowed_mass(&g0, &g1, &ctx),
            Err(Error::AlphabetMismatch { .. }) | Err(Error::SupportViolation { .. })
        ));
    }
}
