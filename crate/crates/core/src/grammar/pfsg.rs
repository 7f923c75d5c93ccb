//! Probabilistic finite-state grammars.
//!
//! A PFSG is a set of states; each state carries rules that either emit a
//! terminal and move to a successor state, or emit the end-of-sentence
//! marker. Sentences are generated independently: after the marker the
//! machine returns to the start state. Because every reachable state can
//! reach the marker with positive probability (validated), absorption is
//! certain and the grammar defines a proper distribution over finite
//! sentences — and therefore over unbounded sentence streams, with exact
//! next-symbol conditionals available from the forward algorithm.

use rand::Rng;

use crate::error::{Error, Result};
use crate::token::{Token, TokenSequence};

/// Index into the prediction alphabet: `0..T` are terminals in declaration
/// order, `T` is the end-of-sentence marker.
pub type SymbolId = usize;

#[derive(Debug, Clone, PartialEq)]
pub enum PfsgEmission {
    /// Emit a terminal and move to the successor state.
    Word { term: usize, next: usize },
    /// Emit the end-of-sentence marker; the next sentence starts fresh.
    End,
}

#[derive(Debug, Clone)]
pub struct PfsgRule {
    pub source: usize,
    pub emission: PfsgEmission,
    pub prob: f64,
    pub line: usize,
}

#[derive(Debug, Clone)]
pub struct Pfsg {
    start: usize,
    state_names: Vec<String>,
    term_names: Vec<String>,
    rules: Vec<PfsgRule>,
    by_state: Vec<Vec<usize>>,
}

impl Pfsg {
    /// Assembles and validates a grammar from parsed parts.
    pub(crate) fn build(
        start: usize,
        state_names: Vec<String>,
        term_names: Vec<String>,
        rules: Vec<PfsgRule>,
    ) -> Result<Self> {
        let mut by_state = vec![Vec::new(); state_names.len()];
        for (i, r) in rules.iter().enumerate() {
            by_state[r.source].push(i);
        }
        let g = Pfsg {
            start,
            state_names,
            term_names,
            rules,
            by_state,
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        // Referenced successor states must themselves carry rules.
        for r in &self.rules {
            if let PfsgEmission::Word { next, .. } = r.emission {
                if self.by_state[next].is_empty() {
                    return Err(Error::UndeclaredSymbol {
                        name: self.state_names[next].clone(),
                        line: r.line,
                    });
                }
            }
        }
        if self.by_state[self.start].is_empty() {
            return Err(Error::UndeclaredSymbol {
                name: self.state_names[self.start].clone(),
                line: 0,
            });
        }
        // Per-source probability sums.
        for (s, idxs) in self.by_state.iter().enumerate() {
            if idxs.is_empty() {
                continue;
            }
            let sum: f64 = idxs.iter().map(|&i| self.rules[i].prob).sum();
            if (sum - 1.0).abs() > 1e-6 {
                return Err(Error::ProbabilitySum {
                    symbol: self.state_names[s].clone(),
                    sum,
                    line: self.rules[idxs[0]].line,
                });
            }
        }
        // Every reachable state must reach an end rule with positive
        // probability; with finitely many states this makes absorption
        // certain, so the total probability of finite sentences is exactly 1.
        let reachable = self.reachable_states();
        let can_end = self.states_reaching_end();
        for s in 0..self.state_names.len() {
            if reachable[s] && !can_end[s] {
                return Err(Error::NonTerminating {
                    detail: format!(
                        "state `{}` is reachable but cannot reach `$end`",
                        self.state_names[s]
                    ),
                });
            }
        }
        Ok(())
    }

    fn reachable_states(&self) -> Vec<bool> {
        let mut seen = vec![false; self.state_names.len()];
        let mut stack = vec![self.start];
        seen[self.start] = true;
        while let Some(s) = stack.pop() {
            for &i in &self.by_state[s] {
                if let PfsgEmission::Word { next, .. } = self.rules[i].emission {
                    if !seen[next] {
                        seen[next] = true;
                        stack.push(next);
                    }
                }
            }
        }
        seen
    }

    fn states_reaching_end(&self) -> Vec<bool> {
        let n = self.state_names.len();
        let mut can = vec![false; n];
        for s in 0..n {
            if self.by_state[s]
                .iter()
                .any(|&i| matches!(self.rules[i].emission, PfsgEmission::End))
            {
                can[s] = true;
            }
        }
        loop {
            let mut changed = false;
            for s in 0..n {
                if can[s] {
                    continue;
                }
                let reaches = self.by_state[s].iter().any(|&i| {
                    matches!(self.rules[i].emission, PfsgEmission::Word { next, .. } if can[next])
                });
                if reaches {
                    can[s] = true;
                    changed = true;
                }
            }
            if !changed {
                return can;
            }
        }
    }

    pub fn start_state(&self) -> usize {
        self.start
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn state_id(&self, name: &str) -> Option<usize> {
        self.state_names.iter().position(|n| n == name)
    }

    /// Terminal names in declaration order (the prediction alphabet,
    /// excluding the end marker).
    pub fn alphabet(&self) -> &[String] {
        &self.term_names
    }

    pub fn rules(&self) -> &[PfsgRule] {
        &self.rules
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn num_terminals(&self) -> usize {
        self.term_names.len()
    }

    /// Symbol count of the prediction alphabet including the end marker.
    pub fn num_symbols(&self) -> usize {
        self.term_names.len() + 1
    }

    /// The id of the end marker in the prediction alphabet.
    pub fn end_symbol(&self) -> SymbolId {
        self.term_names.len()
    }

    pub fn term_id(&self, name: &str) -> Option<usize> {
        self.term_names.iter().position(|n| n == name)
    }

    pub fn symbol_id(&self, tok: &Token) -> Option<SymbolId> {
        match tok {
            Token::End => Some(self.end_symbol()),
            Token::Word(w) => self.term_id(w),
        }
    }

    pub fn symbol_token(&self, sym: SymbolId) -> Token {
        if sym == self.end_symbol() {
            Token::End
        } else {
            Token::word(&self.term_names[sym])
        }
    }

    /// One-hot forward distribution at the start of a sentence.
    pub fn initial_forward(&self) -> Vec<f64> {
        let mut f = vec![0.0; self.state_names.len()];
        f[self.start] = 1.0;
        f
    }

    /// Conditional next-symbol distribution given a normalized forward
    /// distribution over states. Indexed by [`SymbolId`]; sums to 1.
    pub fn next_dist_into(&self, forward: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (s, &w) in forward.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for &i in &self.by_state[s] {
                let r = &self.rules[i];
                match r.emission {
                    PfsgEmission::Word { term, .. } => out[term] += w * r.prob,
                    PfsgEmission::End => out[self.end_symbol()] += w * r.prob,
                }
            }
        }
    }

    pub fn next_dist(&self, forward: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.num_symbols()];
        self.next_dist_into(forward, &mut out);
        out
    }

    /// Advances the forward distribution on an observed symbol, returning the
    /// new normalized distribution and the conditional probability of the
    /// symbol. Returns probability 0 (and an unusable state) for impossible
    /// continuations.
    pub fn advance(&self, forward: &[f64], sym: SymbolId) -> (Vec<f64>, f64) {
        if sym == self.end_symbol() {
            let mut p = 0.0;
            for (s, &w) in forward.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                for &i in &self.by_state[s] {
                    if matches!(self.rules[i].emission, PfsgEmission::End) {
                        p += w * self.rules[i].prob;
                    }
                }
            }
            return (self.initial_forward(), p);
        }
        let mut next = vec![0.0; self.state_names.len()];
        let mut p = 0.0;
        for (s, &w) in forward.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for &i in &self.by_state[s] {
                if let PfsgEmission::Word { term, next: ns } = self.rules[i].emission {
                    if term == sym {
                        let m = w * self.rules[i].prob;
                        next[ns] += m;
                        p += m;
                    }
                }
            }
        }
        if p > 0.0 {
            for v in next.iter_mut() {
                *v /= p;
            }
        }
        (next, p)
    }

    /// -log2 probability of a single sentence (ending with `$end`).
    /// `+inf` when the sentence is outside the language.
    pub fn sentence_log_loss(&self, sentence: &TokenSequence) -> Result<f64> {
        if !sentence.is_single_sentence() {
            return Err(Error::InvalidParameter(
                "sentence_log_loss expects exactly one sentence ending with $end".into(),
            ));
        }
        let mut bits = 0.0;
        let mut fwd = self.initial_forward();
        for tok in sentence.tokens() {
            let sym = self
                .symbol_id(tok)
                .ok_or_else(|| Error::OutOfVocabulary {
                    token: tok.as_str().to_string(),
                })?;
            let (next, p) = self.advance(&fwd, sym);
            if p == 0.0 {
                return Ok(f64::INFINITY);
            }
            bits -= p.log2();
            fwd = next;
        }
        Ok(bits)
    }

    /// log2 probability of a stream prefix (tokens and `$end` markers in any
    /// arrangement). `-inf` for impossible prefixes.
    pub fn stream_log2_prob(&self, prefix: &TokenSequence) -> Result<f64> {
        let mut lp = 0.0;
        let mut fwd = self.initial_forward();
        for tok in prefix.tokens() {
            let sym = self
                .symbol_id(tok)
                .ok_or_else(|| Error::OutOfVocabulary {
                    token: tok.as_str().to_string(),
                })?;
            let (next, p) = self.advance(&fwd, sym);
            if p == 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            lp += p.log2();
            fwd = next;
        }
        Ok(lp)
    }

    /// Forward distribution after consuming a stream prefix.
    /// Errors when the prefix has probability 0.
    pub fn forward_after(&self, prefix: &TokenSequence) -> Result<Vec<f64>> {
        let mut fwd = self.initial_forward();
        for tok in prefix.tokens() {
            let sym = self
                .symbol_id(tok)
                .ok_or_else(|| Error::OutOfVocabulary {
                    token: tok.as_str().to_string(),
                })?;
            let (next, p) = self.advance(&fwd, sym);
            if p == 0.0 {
                return Err(Error::ZeroProbabilityPrefix);
            }
            fwd = next;
        }
        Ok(fwd)
    }

    /// Exact conditional distribution over the alphabet plus `$end`, given a
    /// positive-probability stream prefix.
    pub fn next_symbol_dist(&self, prefix: &TokenSequence) -> Result<Vec<f64>> {
        let fwd = self.forward_after(prefix)?;
        Ok(self.next_dist(&fwd))
    }

    /// Samples one symbol from a distribution using the supplied RNG.
    pub(crate) fn sample_symbol<R: Rng>(dist: &[f64], rng: &mut R) -> SymbolId {
        let roll: f64 = rng.random();
        let mut acc = 0.0;
        for (i, &p) in dist.iter().enumerate() {
            acc += p;
            if roll < acc {
                return i;
            }
        }
        // Floating-point slack: fall back to the last positive entry.
        dist.iter().rposition(|&p| p > 0.0).unwrap_or(0)
    }

    /// Samples a sentence stream of at most `max_tokens` symbols (the end
    /// marker counts as a symbol). Returns the stream and whether generation
    /// was cut off mid-sentence by the budget.
    pub fn generate<R: Rng>(&self, rng: &mut R, max_tokens: usize) -> (TokenSequence, bool) {
        let mut out = TokenSequence::default();
        if max_tokens == 0 {
            return (out, true);
        }
        let mut state = self.start;
        let mut dist = vec![0.0; self.num_symbols()];
        while out.len() < max_tokens {
            let idxs = &self.by_state[state];
            dist.clear();
            dist.extend(idxs.iter().map(|&i| self.rules[i].prob));
            let pick = Self::sample_symbol(&dist, rng);
            match self.rules[idxs[pick]].emission {
                PfsgEmission::Word { term, next } => {
                    out.push(Token::word(&self.term_names[term]));
                    state = next;
                }
                PfsgEmission::End => {
                    out.push(Token::End);
                    state = self.start;
                }
            }
        }
        let truncated = !out.is_segmented();
        (out, truncated)
    }

    /// All sentences of at most `max_tokens` word tokens (excluding the end
    /// marker) with positive probability, lexicographically ordered by
    /// terminal ids. Intended for small grammars.
    pub fn enumerate_sentences(&self, max_tokens: usize) -> Vec<(Vec<String>, f64)> {
        let mut out: Vec<(Vec<usize>, f64)> = Vec::new();
        let mut prefix: Vec<usize> = Vec::new();
        self.enum_rec(self.start, 1.0, max_tokens, &mut prefix, &mut out);
        let mut named: Vec<(Vec<String>, f64)> = out
            .into_iter()
            .map(|(toks, p)| {
                (
                    toks.iter()
                        .map(|&t| self.term_names[t].clone())
                        .collect::<Vec<_>>(),
                    p,
                )
            })
            .collect();
        named.sort_by(|a, b| a.0.cmp(&b.0));
        named
    }

    fn enum_rec(
        &self,
        state: usize,
        prob: f64,
        budget: usize,
        prefix: &mut Vec<usize>,
        out: &mut Vec<(Vec<usize>, f64)>,
    ) {
        // Aggregate duplicate yields arising from distinct state paths.
        let mut end_p = 0.0;
        for &i in &self.by_state[state] {
            match self.rules[i].emission {
                PfsgEmission::End => end_p += prob * self.rules[i].prob,
                PfsgEmission::Word { term, next } => {
                    if budget > 0 {
                        prefix.push(term);
                        self.enum_rec(next, prob * self.rules[i].prob, budget - 1, prefix, out);
                        prefix.pop();
                    }
                }
            }
        }
        if end_p > 0.0 {
            if let Some(entry) = out.iter_mut().find(|(toks, _)| toks == prefix) {
                entry.1 += end_p;
            } else {
                out.push((prefix.clone(), end_p));
            }
        }
    }

    /// Canonical content key used to reject duplicate grammars in a
    /// hypothesis class: rule multiset with resolved names and exact
    /// probability bits.
    pub fn canonical_key(&self) -> String {
        let mut parts: Vec<String> = self
            .rules
            .iter()
            .map(|r| match r.emission {
                PfsgEmission::Word { term, next } => format!(
                    "{}:{}>{}@{:016x}",
                    self.state_names[r.source],
                    self.term_names[term],
                    self.state_names[next],
                    r.prob.to_bits()
                ),
                PfsgEmission::End => format!(
                    "{}:$end@{:016x}",
                    self.state_names[r.source],
                    r.prob.to_bits()
                ),
            })
            .collect();
        parts.sort();
        format!("pfsg|{}|{}", self.state_names[self.start], parts.join(";"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse_grammar;

    fn alternation() -> Pfsg {
        match parse_grammar(
            "format: pfsg\nstart: q0\nq0 : Hi! -> q1 : 1.0\nq1 : Bye! -> q2 : 1.0\nq2 : $end : 1.0\n",
        )
        .unwrap()
        {
            crate::grammar::Grammar::Pfsg(g) => g,
            _ => unreachable!(),
        }
    }

    #[test]
    fn alternation_next_dist() {
        let g = alternation();
        let prefix = TokenSequence::new(vec![Token::word("Hi!")]);
        let d = g.next_symbol_dist(&prefix).unwrap();
        let bye = g.term_id("Bye!").unwrap();
        assert!((d[bye] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_prob_prefix_errors() {
        let g = alternation();
        let prefix = TokenSequence::new(vec![Token::word("Bye!")]);
        assert!(matches!(
            g.next_symbol_dist(&prefix),
            Err(Error::ZeroProbabilityPrefix)
        ));
    }

    #[test]
    fn sentence_loss_and_stream_reset() {
        let g = alternation();
        let s = TokenSequence::sentence("Hi! Bye!");
        assert_eq!(g.sentence_log_loss(&s).unwrap(), 0.0);
        // After $end the machine starts the next sentence fresh.
        let mut stream = TokenSequence::sentence("Hi! Bye!");
        stream.extend(&TokenSequence::sentence("Hi! Bye!"));
        assert_eq!(g.stream_log2_prob(&stream).unwrap(), 0.0);
    }

    #[test]
    fn enumerate_alternation() {
        let g = alternation();
        let all = g.enumerate_sentences(4);
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].0, vec!["Hi!".to_string(), "Bye!".to_string()]);
        assert!((all[0].1 - 1.0).abs() < 1e-12);
    }
}
