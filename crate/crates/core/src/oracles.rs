//! Brute-force reference implementations used by the test suites to
//! cross-check the production algorithms. These enumerate paths, trees, and
//! continuations explicitly and never touch the forward/inside/mixture code
//! they are used to verify. Compiled only with the `test-oracles` feature.

use crate::grammar::{Pcfg, PcfgSym, Pfsg, PfsgEmission};
use crate::token::Token;

/// Brute-force stream probability: explicit sum over every state path.
pub fn oracle_stream_prob(g: &Pfsg, tokens: &[Token]) -> f64 {
    fn rec(g: &Pfsg, tokens: &[Token], pos: usize, state: usize) -> f64 {
        if pos == tokens.len() {
            return 1.0;
        }
        let mut total = 0.0;
        for r in g.rules().iter().filter(|r| r.source == state) {
            match (&tokens[pos], &r.emission) {
                (Token::End, PfsgEmission::End) => {
                    total += r.prob * rec(g, tokens, pos + 1, g.start_state());
                }
                (Token::Word(w), PfsgEmission::Word { term, next })
                    if g.alphabet()[*term] == *w =>
                {
                    total += r.prob * rec(g, tokens, pos + 1, *next);
                }
                _ => {}
            }
        }
        total
    }
    rec(g, tokens, 0, g.start_state())
}

/// Path mass of a prefix broken down by the state it ends in.
pub fn oracle_forward_mass(g: &Pfsg, tokens: &[Token]) -> Vec<f64> {
    let mut mass = vec![0.0; g.num_states()];
    fn rec(g: &Pfsg, tokens: &[Token], pos: usize, state: usize, p: f64, mass: &mut Vec<f64>) {
        if pos == tokens.len() {
            mass[state] += p;
            return;
        }
        for r in g.rules().iter().filter(|r| r.source == state) {
            match (&tokens[pos], &r.emission) {
                (Token::End, PfsgEmission::End) => {
                    rec(g, tokens, pos + 1, g.start_state(), p * r.prob, mass);
                }
                (Token::Word(w), PfsgEmission::Word { term, next })
                    if g.alphabet()[*term] == *w =>
                {
                    rec(g, tokens, pos + 1, *next, p * r.prob, mass);
                }
                _ => {}
            }
        }
    }
    rec(g, tokens, 0, g.start_state(), 1.0, &mut mass);
    mass
}

/// Truncated continuation enumeration: distributes the prefix-conditional
/// mass over the first continuation symbol by enumerating every completion
/// of at most `depth` further symbols. Returns (per-symbol mass indexed like
/// the grammar alphabet with `$end` last, unabsorbed tail).
///
/// The per-symbol masses underestimate the exact conditional by at most the
/// tail, so a tail below 1e-12 certifies 1e-9 agreement.
pub fn oracle_next_dist_truncated(
    g: &Pfsg,
    prefix: &[Token],
    depth: usize,
) -> (Vec<f64>, f64) {
    let fwd = oracle_forward_mass(g, prefix);
    let total: f64 = fwd.iter().sum();
    assert!(total > 0.0, "oracle: prefix must have positive probability");
    let k = g.num_symbols();
    let mut by_first = vec![0.0; k];
    let mut tail = 0.0;
    #[allow(clippy::too_many_arguments)]
    fn rec(
        g: &Pfsg,
        state: usize,
        p: f64,
        first: Option<usize>,
        left: usize,
        by_first: &mut Vec<f64>,
        tail: &mut f64,
    ) {
        if left == 0 {
            *tail += p;
            return;
        }
        for r in g.rules().iter().filter(|r| r.source == state) {
            match &r.emission {
                PfsgEmission::End => {
                    let f = first.unwrap_or(g.end_symbol());
                    by_first[f] += p * r.prob;
                }
                PfsgEmission::Word { term, next } => {
                    let f = first.unwrap_or(*term);
                    rec(g, *next, p * r.prob, Some(f), left - 1, by_first, tail);
                }
            }
        }
    }
    for (s, &w) in fwd.iter().enumerate() {
        if w > 0.0 {
            rec(g, s, w / total, None, depth, &mut by_first, &mut tail);
        }
    }
    (by_first, tail)
}

/// Every parse tree's probability for `words` under `nt`, enumerated
/// explicitly with no chart and no memoization.
pub fn oracle_parse_trees(g: &Pcfg, nt: usize, words: &[usize]) -> Vec<f64> {
    let rules: Vec<_> = g.rules().iter().filter(|r| r.lhs == nt).collect();
    let mut trees = Vec::new();
    for r in rules {
        // Enumerate segmentations of `words` across the rhs symbols.
        fn seg(
            g: &Pcfg,
            rhs: &[PcfgSym],
            words: &[usize],
            acc: f64,
            out: &mut Vec<f64>,
        ) {
            match rhs.first() {
                None => {
                    if words.is_empty() {
                        out.push(acc);
                    }
                }
                Some(PcfgSym::Terminal(t)) => {
                    if words.first() == Some(t) {
                        seg(g, &rhs[1..], &words[1..], acc, out);
                    }
                }
                Some(PcfgSym::Nonterminal(b)) => {
                    // Later symbols each need at least one word; without this
                    // cap a rule like `S -> S S` would recurse on its own span.
                    let max_cut = words.len().saturating_sub(rhs.len() - 1);
                    for cut in 1..=max_cut {
                        for tp in oracle_parse_trees(g, *b, &words[..cut]) {
                            seg(g, &rhs[1..], &words[cut..], acc * tp, out);
                        }
                    }
                }
            }
        }
        seg(g, &r.rhs, words, r.prob, &mut trees);
    }
    trees
}

pub fn oracle_inside(g: &Pcfg, words: &[usize]) -> f64 {
    oracle_parse_trees(g, g.start_symbol(), words).iter().sum()
}

/// All strings over the alphabet up to a length bound (for exhaustive
/// grammaticality verdicts).
pub fn all_strings(alphabet: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &layer {
            for a in 0..alphabet {
                let mut t = s.clone();
                t.push(a);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Naive pattern scanner over tokenized sentences (the corpus oracle).
pub fn oracle_pattern_count(sentences: &[Vec<String>], pattern: &[&str]) -> u64 {
    let mut count = 0;
    for s in sentences {
        if pattern.len() > s.len() {
            continue;
        }
        for at in 0..=(s.len() - pattern.len()) {
            let hit = pattern
                .iter()
                .enumerate()
                .all(|(i, p)| *p == "*" || s[at + i] == *p);
            if hit {
                count += 1;
            }
        }
    }
    count
}
