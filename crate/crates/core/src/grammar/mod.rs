//! Probabilistic grammars in two formalisms.
//!
//! PFSGs support exact prefix and next-symbol conditionals (everything the
//! sequential learner needs); PCFGs support whole-sentence inside
//! probabilities (everything the coding layer needs). Grammars are immutable
//! after construction and cheap to share across threads.

mod parse;
pub mod pcfg;
pub mod pfsg;

pub use parse::parse_grammar;
pub use pcfg::{Pcfg, PcfgRule, PcfgSym};
pub use pfsg::{Pfsg, PfsgEmission, PfsgRule, SymbolId};

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::token::TokenSequence;

/// A validated probabilistic grammar.
#[derive(Debug, Clone)]
pub enum Grammar {
    Pfsg(Pfsg),
    Pcfg(Pcfg),
}

impl Grammar {
    pub fn formalism(&self) -> &'static str {
        match self {
            Grammar::Pfsg(_) => "pfsg",
            Grammar::Pcfg(_) => "pcfg",
        }
    }

    /// Terminal names in declaration order.
    pub fn alphabet(&self) -> &[String] {
        match self {
            Grammar::Pfsg(g) => g.alphabet(),
            Grammar::Pcfg(g) => g.alphabet(),
        }
    }

    pub fn rule_count(&self) -> usize {
        match self {
            Grammar::Pfsg(g) => g.rules().len(),
            Grammar::Pcfg(g) => g.rules().len(),
        }
    }

    /// Number of states (PFSG) or nonterminals (PCFG).
    pub fn num_sources(&self) -> usize {
        match self {
            Grammar::Pfsg(g) => g.num_states(),
            Grammar::Pcfg(g) => g.num_nonterminals(),
        }
    }

    pub fn num_terminals(&self) -> usize {
        match self {
            Grammar::Pfsg(g) => g.num_terminals(),
            Grammar::Pcfg(g) => g.num_terminals(),
        }
    }

    /// Right-hand-side symbol count of every rule, in file order.
    /// PFSG transitions have arity 2 (terminal, successor); end rules arity 1.
    pub fn rule_arities(&self) -> Vec<usize> {
        match self {
            Grammar::Pfsg(g) => g
                .rules()
                .iter()
                .map(|r| match r.emission {
                    PfsgEmission::Word { .. } => 2,
                    PfsgEmission::End => 1,
                })
                .collect(),
            Grammar::Pcfg(g) => g.rules().iter().map(|r| r.rhs.len()).collect(),
        }
    }

    /// Rule count per source, for sources that have at least one rule.
    pub fn source_rule_counts(&self) -> Vec<usize> {
        let (n, iter): (usize, Vec<usize>) = match self {
            Grammar::Pfsg(g) => (g.num_states(), g.rules().iter().map(|r| r.source).collect()),
            Grammar::Pcfg(g) => (
                g.num_nonterminals(),
                g.rules().iter().map(|r| r.lhs).collect(),
            ),
        };
        let mut counts = vec![0usize; n];
        for s in iter {
            counts[s] += 1;
        }
        counts.into_iter().filter(|&c| c > 0).collect()
    }

    /// Deterministic sampling of a sentence stream. Returns the stream and a
    /// flag marking whether the token budget cut a sentence short.
    pub fn generate(&self, seed: u64, max_tokens: usize) -> (TokenSequence, bool) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        match self {
            Grammar::Pfsg(g) => g.generate(&mut rng, max_tokens),
            Grammar::Pcfg(g) => g.generate(&mut rng, max_tokens),
        }
    }

    /// -log2 P(sentence); `+inf` iff the grammar assigns probability 0.
    pub fn sentence_log_loss(&self, sentence: &TokenSequence) -> Result<f64> {
        match self {
            Grammar::Pfsg(g) => g.sentence_log_loss(sentence),
            Grammar::Pcfg(g) => g.sentence_log_loss(sentence),
        }
    }

    /// True iff the sentence has positive probability. Out-of-vocabulary
    /// tokens make a sentence ungrammatical rather than erroring.
    pub fn is_grammatical(&self, sentence: &TokenSequence) -> bool {
        match self.sentence_log_loss(sentence) {
            Ok(bits) => bits.is_finite(),
            Err(Error::OutOfVocabulary { token }) => {
                log::warn!("out-of-vocabulary token `{token}` treated as ungrammatical");
                false
            }
            Err(_) => false,
        }
    }

    /// Exact next-symbol conditional for PFSGs; errors for PCFGs.
    pub fn next_symbol_dist(&self, prefix: &TokenSequence) -> Result<Vec<f64>> {
        match self {
            Grammar::Pfsg(g) => g.next_symbol_dist(prefix),
            Grammar::Pcfg(_) => Err(Error::FormalismUnsupported {
                formalism: "pcfg".into(),
            }),
        }
    }

    /// All sentences up to a word-length bound, ordered deterministically.
    pub fn enumerate_sentences(&self, max_tokens: usize) -> Vec<(Vec<String>, f64)> {
        match self {
            Grammar::Pfsg(g) => g.enumerate_sentences(max_tokens),
            Grammar::Pcfg(g) => g.enumerate_sentences(max_tokens),
        }
    }

    pub fn canonical_key(&self) -> String {
        match self {
            Grammar::Pfsg(g) => g.canonical_key(),
            Grammar::Pcfg(g) => g.canonical_key(),
        }
    }

    pub fn as_pfsg(&self) -> Result<&Pfsg> {
        match self {
            Grammar::Pfsg(g) => Ok(g),
            Grammar::Pcfg(_) => Err(Error::FormalismUnsupported {
                formalism: "pcfg".into(),
            }),
        }
    }
}
